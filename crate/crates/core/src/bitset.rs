//! Fixed-capacity bit vectors encoding subsets of a cluster's k sources.

/// Machine word width used for bit-subsets.
pub const WORD_BITS: usize = 64;

/// Number of words needed for a subset of capacity `k`.
pub const fn words_for(k: usize) -> usize {
    k.div_ceil(WORD_BITS)
}

/// A subset of a cluster's `k` sources, packed into `ceil(k/64)` words.
/// Bit `i` set means the i-th source is a member; bits at positions >= k
/// are always zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitSubset {
    k: usize,
    words: Vec<u64>,
}

impl BitSubset {
    pub fn empty(k: usize) -> BitSubset {
        BitSubset {
            k,
            words: vec![0; words_for(k)],
        }
    }

    /// Build from raw words, masking any tail bits beyond `k`.
    pub fn from_words(k: usize, mut words: Vec<u64>) -> BitSubset {
        assert_eq!(
            words.len(),
            words_for(k),
            "word count mismatch for capacity {k}"
        );
        mask_tail(k, &mut words);
        BitSubset { k, words }
    }

    /// The full set {0, ..., k-1}.
    pub fn full(k: usize) -> BitSubset {
        let mut words = vec![u64::MAX; words_for(k)];
        mask_tail(k, &mut words);
        BitSubset { k, words }
    }

    pub fn capacity(&self) -> usize {
        self.k
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.k, "source index {i} out of capacity {}", self.k);
        self.words[i / WORD_BITS] |= 1u64 << (i % WORD_BITS);
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.k && self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Word-parallel set union; touches exactly `ceil(k/64)` words.
    pub fn union(&self, other: &BitSubset) -> BitSubset {
        assert_eq!(self.k, other.k, "bit-subset capacity mismatch");
        BitSubset {
            k: self.k,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a | b)
                .collect(),
        }
    }

    /// Word-parallel set difference `self \ other`.
    pub fn difference(&self, other: &BitSubset) -> BitSubset {
        assert_eq!(self.k, other.k, "bit-subset capacity mismatch");
        BitSubset {
            k: self.k,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & !b)
                .collect(),
        }
    }

    /// True iff the intersection is nonempty.
    pub fn intersects(&self, other: &BitSubset) -> bool {
        assert_eq!(self.k, other.k, "bit-subset capacity mismatch");
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    /// Member indices in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let bit = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD_BITS + bit)
                }
            })
        })
    }

    /// Index of the lowest member, if any.
    pub fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .position(|&w| w != 0)
            .map(|wi| wi * WORD_BITS + self.words[wi].trailing_zeros() as usize)
    }
}

fn mask_tail(k: usize, words: &mut [u64]) {
    let tail = k % WORD_BITS;
    if tail != 0 {
        if let Some(last) = words.last_mut() {
            *last &= (1u64 << tail) - 1;
        }
    } else if k == 0 {
        debug_assert!(words.is_empty());
    }
}
