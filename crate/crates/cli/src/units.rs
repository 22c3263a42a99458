//! Flag values with explicit scale: `x12.5` is linear, `11db` is decibels.

use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sir {
    pub linear: f64,
    pub as_db: bool,
}

impl Sir {
    pub fn db(self) -> f64 {
        10.0 * self.linear.log10()
    }
}

impl FromStr for Sir {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let lower = t.to_ascii_lowercase();
        let (linear, as_db) = if let Some(v) = lower.strip_suffix("db") {
            let db: f64 = v.trim().parse().map_err(|_| format!("`{s}`: not a number before `db`"))?;
            (10f64.powf(db / 10.0), true)
        } else if let Some(v) = lower.strip_prefix('x') {
            (v.trim().parse().map_err(|_| format!("`{s}`: not a number after `x`"))?, false)
        } else {
            return Err(format!("`{s}`: give a linear ratio as `x12.5` or decibels as `11db`"));
        };
        if !(linear > 0.0) || !linear.is_finite() {
            return Err(format!("`{s}`: SIR must be positive and finite"));
        }
        Ok(Sir { linear, as_db })
    }
}

/// `FROM:TO:COUNT`, evenly spaced in the scale of the endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirSweep {
    pub from: Sir,
    pub to: Sir,
    pub count: usize,
}

impl SirSweep {
    pub fn values(&self) -> Vec<Sir> {
        let n = self.count;
        (0..n)
            .map(|i| {
                let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
                if self.from.as_db {
                    let db = self.from.db() + t * (self.to.db() - self.from.db());
                    Sir { linear: 10f64.powf(db / 10.0), as_db: true }
                } else {
                    Sir { linear: self.from.linear + t * (self.to.linear - self.from.linear), as_db: false }
                }
            })
            .collect()
    }
}

impl FromStr for SirSweep {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts[..] else {
            return Err(format!("`{s}`: expected FROM:TO:COUNT"));
        };
        let from: Sir = a.parse()?;
        let to: Sir = b.parse()?;
        if from.as_db != to.as_db {
            return Err(format!("`{s}`: both ends must use the same scale"));
        }
        let count: usize = n.parse().map_err(|_| format!("`{s}`: bad count `{n}`"))?;
        if count == 0 {
            return Err(format!("`{s}`: count must be positive"));
        }
        Ok(SirSweep { from, to, count })
    }
}

/// `NXxNY`, e.g. `500x500`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid2 {
    pub a: usize,
    pub b: usize,
}

impl FromStr for Grid2 {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("`{s}`: expected e.g. 64x33"))?;
        let a = a.parse().map_err(|_| format!("`{s}`: bad first extent"))?;
        let b = b.parse().map_err(|_| format!("`{s}`: bad second extent"))?;
        Ok(Grid2 { a, b })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scales() {
        assert_eq!("x12.5".parse::<Sir>().unwrap().linear, 12.5);
        assert_eq!("10db".parse::<Sir>().unwrap().linear, 10.0);
        assert_eq!("0dB".parse::<Sir>().unwrap().linear, 1.0);
    }

    #[test]
    fn bare_number_rejected() {
        assert!("12.5".parse::<Sir>().is_err());
        assert!("x-1".parse::<Sir>().is_err());
    }

    #[test]
    fn db_sweep_is_even_in_db() {
        let v = "0db:20db:3".parse::<SirSweep>().unwrap().values();
        assert_eq!(v.iter().map(|s| s.linear).collect::<Vec<_>>(), vec![1.0, 10.0, 100.0]);
        assert!("x1:10db:3".parse::<SirSweep>().is_err());
    }

    #[test]
    fn grid() {
        assert_eq!("64x33".parse::<Grid2>().unwrap(), Grid2 { a: 64, b: 33 });
        assert!("64".parse::<Grid2>().is_err());
    }
}
