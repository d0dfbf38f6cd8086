/// Channel occupancy of every link as a bitset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumState {
    n_channels: usize,
    words: usize,
    bits: Vec<u64>,
}

impl SpectrumState {
    pub fn new(n_links: usize, n_channels: usize) -> Self {
        let words = n_channels.div_ceil(64);
        SpectrumState { n_channels, words, bits: vec![0; n_links * words] }
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn n_links(&self) -> usize {
        self.bits.len().checked_div(self.words).unwrap_or(0)
    }

    pub fn is_occupied(&self, link: usize, channel: usize) -> bool {
        self.bits[link * self.words + channel / 64] >> (channel % 64) & 1 == 1
    }

    /// True if `channel` is free on every link of `links`.
    pub fn is_free_on(&self, links: &[usize], channel: usize) -> bool {
        links.iter().all(|&l| !self.is_occupied(l, channel))
    }

    /// Marks `channel` on every link; returns false (and changes nothing) if
    /// any of them is already taken.
    pub fn occupy(&mut self, links: &[usize], channel: usize) -> bool {
        if !self.is_free_on(links, channel) {
            return false;
        }
        for &l in links {
            self.bits[l * self.words + channel / 64] |= 1 << (channel % 64);
        }
        true
    }

    pub fn occupied_count(&self, link: usize) -> usize {
        self.bits[link * self.words..(link + 1) * self.words].iter().map(|w| w.count_ones() as usize).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn occupy_is_all_or_nothing() {
        let mut s = SpectrumState::new(3, 266);
        assert_eq!(s.n_links(), 3);
        assert!(s.occupy(&[0, 1], 200));
        assert!(s.is_occupied(1, 200));
        assert!(!s.is_occupied(2, 200));
        assert!(!s.occupy(&[1, 2], 200));
        assert!(!s.is_occupied(2, 200));
        assert!(s.occupy(&[2], 65));
        assert_eq!(s.occupied_count(0), 1);
        assert_eq!(s.occupied_count(2), 1);
    }
}
