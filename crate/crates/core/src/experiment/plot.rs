use super::spec::{ExperimentKind, ExperimentSpec};

/// A gnuplot script that plots the CSV written next to it.
pub(crate) fn gnuplot_script(spec: &ExperimentSpec) -> Option<String> {
    let stem = spec.kind.file_stem();
    let mut s = format!(
        "set datafile separator ','\nset datafile commentschars '#'\nset key outside\nset grid\nset terminal pngcairo size 900,600\nset output '{stem}.png'\n"
    );
    match spec.kind {
        ExperimentKind::SeVsSnr => {
            s.push_str(
                "set xlabel 'transmit SNR (dB)'\nset ylabel 'sum-SE (bits/s/Hz)'\nplot \\\n",
            );
            let mut curves = Vec::new();
            for n in &spec.sweep.n_elements {
                for op in ["X", "Y"] {
                    for (src, style) in [("mc", "points"), ("analytic", "lines")] {
                        curves.push(format!(
                            "  '{stem}.csv' every ::1 using ((stringcolumn(2) eq '{n}' && stringcolumn(3) eq '{op}' && stringcolumn(4) eq '{src}') ? $1 : 1/0):5 with {style} title '{op} N={n} {src}'"
                        ));
                    }
                }
            }
            s.push_str(&curves.join(", \\\n"));
        }
        ExperimentKind::SeVsN => {
            s.push_str(
                "set logscale x 2\nset xlabel 'N'\nset ylabel 'sum-SE (bits/s/Hz)'\nplot \\\n",
            );
            let mut curves = Vec::new();
            for g in &spec.sweep.gammas {
                for op in ["X", "Y"] {
                    for (src, style) in [("mc", "points"), ("analytic", "lines")] {
                        curves.push(format!(
                            "  '{stem}.csv' every ::1 using ((stringcolumn(1) eq '{}' && stringcolumn(3) eq '{op}' && stringcolumn(4) eq '{src}' && $2 > 0) ? $2 : 1/0):5 with {style} title '{op} {} dB {src}'",
                            g.db, g.db
                        ));
                    }
                }
            }
            s.push_str(&curves.join(", \\\n"));
        }
        ExperimentKind::Ccdf => {
            s.push_str("set xlabel 'z'\nset ylabel 'Pr(Z > z)'\nplot \\\n");
            let mut curves = Vec::new();
            for n in &spec.sweep.n_elements {
                curves.push(format!(
                    "  '{stem}.csv' every ::1 using ($1 == {n} ? $2 : 1/0):3 with lines title 'N={n} empirical'"
                ));
                curves.push(format!(
                    "  '{stem}.csv' every ::1 using ($1 == {n} ? $2 : 1/0):4 with lines dashtype 2 title 'N={n} analytic'"
                ));
            }
            s.push_str(&curves.join(", \\\n"));
        }
        ExperimentKind::Validate => return None,
    }
    s.push('\n');
    Some(s)
}
