//! Gnuplot script that draws, per sample size, the empirical MSE of each
//! estimator against `r` with the CRB and MSE-bound curves overlaid on a
//! logarithmic vertical axis.

use std::fmt::Write as _;

use crate::harness::SweepConfig;

/// Script reading `csv_name` (the sweep CSV) and writing `mse_n<N>.png`.
pub fn gnuplot_script(cfg: &SweepConfig, csv_name: &str) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set terminal pngcairo size 900,650\n");
    s.push_str("set logscale y\n");
    s.push_str("set xlabel 'r'\nset ylabel 'mean-square error'\n");
    s.push_str("set key top right\n");
    for &n in &cfg.n_list {
        let _ = writeln!(s, "\n# n = {n}");
        let _ = writeln!(s, "set output 'mse_n{n}.png'");
        let _ = writeln!(s, "set title 'n = {n}'");
        let mut curves = Vec::new();
        for est in &cfg.estimators {
            curves.push(format!(
                "'{csv_name}' using (strcol(1) eq 'estimate' && $2 == {n} && strcol(4) eq '{e}' ? $3 : 1/0):5 with linespoints title '{e}'",
                e = est.name()
            ));
        }
        curves.push(format!(
            "'{csv_name}' using (strcol(1) eq 'bound' && $2 == {n} ? $3 : 1/0):10 with lines dt 2 title 'CRB'"
        ));
        curves.push(format!(
            "'{csv_name}' using (strcol(1) eq 'bound' && $2 == {n} ? $3 : 1/0):11 with lines lw 2 title 'MSE bound'"
        ));
        let _ = writeln!(s, "plot {}", curves.join(", \\\n     "));
    }
    s
}
