//! Runtime configuration: the `-1`/`2` square flags and named resource caps.

use std::collections::BTreeMap;

/// Named size limits for the brute-force suites.  All caps are surfaced in
/// verification reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Caps {
    map: BTreeMap<String, u64>,
}

impl Default for Caps {
    fn default() -> Self {
        let mut map = BTreeMap::new();
        // largest Weyl group enumerated by brute force (|W| <= 4e5 covers
        // B6, D7 and A8)
        map.insert("group_order".to_owned(), 400_000);
        // rank limits for the fingerprint suites
        map.insert("fingerprint_b".to_owned(), 10);
        map.insert("fingerprint_d".to_owned(), 8);
        // rank limit for the fixed-basis suites (2^n-dimensional spaces)
        map.insert("fixed_basis".to_owned(), 6);
        // rank limit for the restriction-formula suite
        map.insert("siw0".to_owned(), 8);
        // 1 enables the experimental odd-rank type-D family
        map.insert("odd_d".to_owned(), 0);
        // variable limit for the negligibility procedure (2^n restrictions)
        map.insert("negligible_vars".to_owned(), 24);
        Caps { map }
    }
}

impl Caps {
    pub fn get(&self, name: &str) -> u64 {
        self.map.get(name).copied().unwrap_or(0)
    }

    pub fn set(&mut self, name: &str, value: u64) {
        self.map.insert(name.to_owned(), value);
    }

    pub fn as_map(&self) -> &BTreeMap<String, u64> {
        &self.map
    }

    /// Parses `name=value,name=value` override lists (the `COXINV_CAPS`
    /// format).
    pub fn apply_overrides(&mut self, spec: &str) -> Result<(), String> {
        for entry in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, value) = entry
                .split_once('=')
                .ok_or_else(|| format!("cap override `{entry}` is not name=value"))?;
            let v: u64 = value
                .trim()
                .parse()
                .map_err(|_| format!("cap value in `{entry}` is not a number"))?;
            self.map.insert(name.trim().to_owned(), v);
        }
        Ok(())
    }
}

/// Flag profile plus caps carried through the verification suites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub minus_one_square: bool,
    pub two_square: bool,
    pub caps: Caps,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            minus_one_square: true,
            two_square: true,
            caps: Caps::default(),
        }
    }
}

impl Config {
    pub fn flags(&self) -> (bool, bool) {
        (self.minus_one_square, self.two_square)
    }

    pub fn with_flags(minus_one_square: bool, two_square: bool) -> Self {
        Config {
            minus_one_square,
            two_square,
            caps: Caps::default(),
        }
    }
}
