//! Seeded synthetic decision tables for tests and benchmarking.

use std::io::Write;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::table::{DecisionTable, TableBuilder};

/// Parameters of a uniform random categorical table. The same seed always
/// produces the same rows, whether emitted as CSV or built directly.
#[derive(Clone, Copy, Debug)]
pub struct SyntheticSpec {
    pub n_objects: usize,
    pub n_attrs: usize,
    pub values_per_attr: u32,
    pub decision_classes: u32,
    pub seed: u64,
}

impl SyntheticSpec {
    fn validate(&self) -> Result<()> {
        if self.n_objects == 0 || self.n_attrs == 0 || self.values_per_attr == 0 || self.decision_classes == 0 {
            return Err(Error::domain(
                "synthetic tables need at least one object, attribute, value and class",
            ));
        }
        Ok(())
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    fn for_each_row(&self, mut sink: impl FnMut(&[u32])) {
        let mut rng = self.rng();
        let mut row = vec![0u32; self.n_attrs + 1];
        for _ in 0..self.n_objects {
            for slot in row.iter_mut().take(self.n_attrs) {
                *slot = rng.random_range(0..self.values_per_attr);
            }
            row[self.n_attrs] = rng.random_range(0..self.decision_classes);
            sink(&row);
        }
    }

    /// Writes the table as headerless CSV, decision column last.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        self.validate()?;
        let mut line = String::new();
        let mut io_err: Option<std::io::Error> = None;
        self.for_each_row(|row| {
            if io_err.is_some() {
                return;
            }
            line.clear();
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    line.push(',');
                }
                line.push_str(&v.to_string());
            }
            line.push('\n');
            if let Err(e) = w.write_all(line.as_bytes()) {
                io_err = Some(e);
            }
        });
        match io_err {
            Some(e) => Err(e.into()),
            None => Ok(()),
        }
    }

    /// Builds the table in memory, with the same dictionary encoding the CSV
    /// route would produce.
    pub fn generate_table(&self) -> Result<DecisionTable> {
        self.validate()?;
        let names = (1..=self.n_attrs).map(|i| format!("a{i}")).collect();
        let mut builder = TableBuilder::new(names, "d".to_string());
        let mut fields: Vec<String> = Vec::new();
        self.for_each_row(|row| {
            fields.clear();
            fields.extend(row.iter().map(|v| v.to_string()));
            let refs: Vec<&str> = fields.iter().map(String::as_str).collect();
            builder.push_row(&refs);
        });
        builder.finish("synthetic table with zero rows")
    }
}
