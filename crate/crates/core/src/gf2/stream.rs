use super::GeneratorMatrix;

/// Canonical codebook order: entry `j - 1` carries message index `j - 1` and
/// its codeword. This pairing fixes the column order of `W1` and the row
/// order of `W2`.
#[derive(Debug, Clone)]
pub struct CodewordStream<'a> {
    code: &'a GeneratorMatrix,
    next: u64,
    end: u64,
    current: u64,
}

impl<'a> CodewordStream<'a> {
    pub fn new(code: &'a GeneratorMatrix) -> Self {
        Self { code, next: 0, end: code.size(), current: 0 }
    }

    pub fn code(&self) -> &'a GeneratorMatrix {
        self.code
    }

    /// All codewords in canonical order.
    pub fn materialize(code: &GeneratorMatrix) -> Vec<u64> {
        CodewordStream::new(code).map(|(_, cw)| cw).collect()
    }
}

impl Iterator for CodewordStream<'_> {
    /// `(message index, codeword)`.
    type Item = (u64, u64);

    #[inline]
    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.end {
            return None;
        }
        let j = self.next;
        if j > 0 {
            // consecutive indices differ in the trailing ones plus one bit
            self.current ^= self.code.encode_index(j ^ (j - 1));
        }
        self.next += 1;
        Some((j, self.current))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rem = (self.end - self.next) as usize;
        (rem, Some(rem))
    }
}

impl ExactSizeIterator for CodewordStream<'_> {}

/// One step of a binary-reflected Gray-code walk over the messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GrayStep {
    pub step: u64,
    /// Message index `step ^ (step >> 1)`.
    pub index: u64,
    pub codeword: u64,
    /// Generator row toggled to reach this codeword (none at step 0).
    pub flipped_row: Option<usize>,
}

/// Visits all `2^k` codewords so that consecutive messages differ in one bit;
/// the flipped index bit at step `s` is `trailing_zeros(s)`.
#[derive(Debug, Clone)]
pub struct GrayWalk<'a> {
    code: &'a GeneratorMatrix,
    step: u64,
    codeword: u64,
}

impl<'a> GrayWalk<'a> {
    pub fn new(code: &'a GeneratorMatrix) -> Self {
        Self { code, step: 0, codeword: 0 }
    }
}

impl Iterator for GrayWalk<'_> {
    type Item = GrayStep;

    #[inline]
    fn next(&mut self) -> Option<GrayStep> {
        let s = self.step;
        if s >= self.code.size() {
            return None;
        }
        self.step += 1;
        let flipped_row = if s == 0 {
            None
        } else {
            let row = self.code.k() - 1 - s.trailing_zeros() as usize;
            self.codeword ^= self.code.row(row);
            Some(row)
        };
        Some(GrayStep { step: s, index: s ^ (s >> 1), codeword: self.codeword, flipped_row })
    }
}
