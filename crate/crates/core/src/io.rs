//! Deterministic text output: every number is printed with 17 significant
//! digits so files round-trip bit-exactly through the decimal form, and
//! writers never embed timestamps.

use std::io::{self, Write};

use crate::grid::WaveFunction;
use crate::moments::MomentState;

/// Formats a double with 17 significant digits (round-trip exact).
pub fn format_g17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes a wavefunction as CSV rows `x,re,im`.
pub fn write_wavefunction_csv(w: &mut impl Write, psi: &WaveFunction) -> io::Result<()> {
    writeln!(w, "x,re,im")?;
    let grid = psi.grid();
    for (j, z) in psi.samples().iter().enumerate() {
        writeln!(
            w,
            "{},{},{}",
            format_g17(grid.point(j)),
            format_g17(z.re),
            format_g17(z.im)
        )?;
    }
    Ok(())
}

/// Writes a density profile as CSV rows `x,density`.
pub fn write_density_csv(w: &mut impl Write, psi: &WaveFunction) -> io::Result<()> {
    writeln!(w, "x,density")?;
    let grid = psi.grid();
    for (j, z) in psi.samples().iter().enumerate() {
        writeln!(w, "{},{}", format_g17(grid.point(j)), format_g17(z.norm_sqr()))?;
    }
    Ok(())
}

/// Writes a moment trajectory as CSV rows `t,p,x,d11,d12,d22`.
pub fn write_trajectory_csv(
    w: &mut impl Write,
    trajectory: &[(f64, MomentState)],
) -> io::Result<()> {
    writeln!(w, "t,p,x,d11,d12,d22")?;
    for (t, st) in trajectory {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            format_g17(*t),
            format_g17(st.p),
            format_g17(st.x),
            format_g17(st.d11),
            format_g17(st.d12),
            format_g17(st.d22)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use num_complex::Complex64;

    #[test]
    fn g17_round_trips_doubles() {
        for &v in &[std::f64::consts::PI, 1.0 / 3.0, 1e-300, -2.2250738585072014e-308, 0.1 + 0.2]
        {
            let s = format_g17(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
    }

    #[test]
    fn wavefunction_csv_shape() {
        let grid = Grid::symmetric(1.0, 4).unwrap();
        let psi = WaveFunction::from_fn(grid, |x| Complex64::new(x, -x)).unwrap();
        let mut buf = Vec::new();
        write_wavefunction_csv(&mut buf, &psi).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "x,re,im");
        assert!(lines[1].starts_with("-1"));
    }
}
