use std::io::Write;
use std::path::Path;

use crate::error::BasisError;
use crate::ladder::WSBasis;

impl WSBasis {
    /// Per-site CSV: n, E_n, bulk flag.
    pub fn write_ladder_csv(&self, path: &Path) -> Result<(), BasisError> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(w, "n,E_n,bulk")?;
        for (n, e) in self.sites.iter().zip(&self.energies) {
            writeln!(w, "{},{:.12e},{}", n, e, u8::from(self.in_bulk(*n)))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Wide CSV: x followed by one column per site.
    pub fn write_states_csv(&self, path: &Path) -> Result<(), BasisError> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        write!(w, "x")?;
        for n in &self.sites {
            write!(w, ",phi_{n}")?;
        }
        writeln!(w)?;
        for i in 0..self.grid.interior() {
            write!(w, "{:.10}", self.grid.x(i))?;
            for s in &self.states {
                write!(w, ",{:.10e}", s[i])?;
            }
            writeln!(w)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn diagnostics_text(&self) -> String {
        let d = &self.diagnostics;
        format!(
            "sites = {}\nbulk_lo = {}\nbulk_hi = {}\nmargin = {}\nladder_deviation = {:.6e}\nladder_tol = {:.6e}\n\
             translation_window = {:.6e}\ntranslation_full_box = {:.6e}\ntrans_tol = {:.6e}\nexcited_discarded = {}\n\
             min_gap = {:.6e}\nmin_local_mass3 = {:.6}\nmin_local_mass1 = {:.6}\nmax_residual = {:.3e}\n",
            self.sites.len(),
            self.bulk.0,
            self.bulk.1,
            d.margin,
            d.ladder_deviation,
            d.ladder_tol,
            d.translation_window,
            d.translation_full_box,
            d.trans_tol,
            d.excited_discarded,
            d.min_gap,
            d.min_local_mass3,
            d.min_local_mass1,
            d.max_residual
        )
    }
}
