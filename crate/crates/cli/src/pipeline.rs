//! The fixed-order batch pipeline: scale, order, factor, solve, analyze,
//! updates; reports in text or CSV.

use std::fmt::Write as _;
use std::path::Path;

use sparsedirect::dense::DenseMat;
use sparsedirect::fillasym::{metric_pivot_order, p3_order, FillMetric};
use sparsedirect::fpscale::{expo_stats, scale, FpSystem, RoundMode, ScaleMethod};
use sparsedirect::lufact::{factor_gauss, FlopCounts, LuOptions, Pivoting};
use sparsedirect::pattern::BoolPattern;
use sparsedirect::perm::{permute_dense, Permutation, Side};
use sparsedirect::stability::{cond, norm, vec_norm, wilkinson_bound, PNorm};
use sparsedirect::symelim::{dissection_order, orgm_order, UGraph};
use sparsedirect::testmat::{gen_test, TestKind};
use sparsedirect::update::BgBasis;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Csv,
}

impl ReportFormat {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "text" => Ok(ReportFormat::Text),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(format!("unknown report format '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ordering {
    None,
    Markowitz,
    Tewarson,
    P3,
    P4,
    Orgm,
    Dissection,
}

impl Ordering {
    fn parse(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "none" | "natural" => Ok(Ordering::None),
            "markowitz" => Ok(Ordering::Markowitz),
            "tewarson" => Ok(Ordering::Tewarson),
            "p3" => Ok(Ordering::P3),
            "p4" => Ok(Ordering::P4),
            "orgm" => Ok(Ordering::Orgm),
            "dissection" => Ok(Ordering::Dissection),
            other => Err(format!("unknown ordering '{other}'")),
        }
    }

    fn needs_symmetry(self) -> bool {
        matches!(self, Ordering::Orgm | Ordering::Dissection)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factorization {
    Lu,
    Cholesky,
    Qr,
}

impl Factorization {
    fn parse(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "lu" => Ok(Factorization::Lu),
            "cholesky" | "chol" => Ok(Factorization::Cholesky),
            "qr" => Ok(Factorization::Qr),
            other => Err(format!("unknown factorization '{other}'")),
        }
    }
}

pub struct PipelineConfig {
    pub input: Option<std::path::PathBuf>,
    pub gen: Option<String>,
    pub scale: Option<ScaleMethod>,
    pub order: Ordering,
    pub factor: Factorization,
    pub fp: FpSystem,
    pub alpha: f64,
    pub pivomin: f64,
    pub multmax: f64,
    pub report: ReportFormat,
    pub seed: u64,
    pub updates: Vec<usize>,
    pub analyze: bool,
}

impl PipelineConfig {
    pub fn from_args(args: &crate::RunArgs) -> Result<Self, String> {
        // file values first, flags override where explicitly given
        let mut kv = std::collections::HashMap::new();
        if let Some(path) = &args.config {
            for (lineno, line) in std::fs::read_to_string(path)
                .map_err(|e| format!("config: {e}"))?
                .lines()
                .enumerate()
            {
                let t = line.trim();
                if t.is_empty() || t.starts_with('#') {
                    continue;
                }
                let (k, v) = t
                    .split_once('=')
                    .ok_or_else(|| format!("config line {}: expected key=value", lineno + 1))?;
                kv.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        let pick = |flag: Option<String>, key: &str| -> Option<String> {
            flag.or_else(|| kv.get(key).cloned())
        };
        let input = args
            .input
            .clone()
            .or_else(|| kv.get("input").map(std::path::PathBuf::from));
        let gen = pick(args.gen.clone(), "gen");
        if input.is_none() && gen.is_none() {
            return Err("no matrix source: pass --input FILE or --gen KIND:N".into());
        }
        let scale = match pick(args.scale.clone(), "scale") {
            None => None,
            Some(s) if s.eq_ignore_ascii_case("none") => None,
            Some(s) => {
                Some(ScaleMethod::parse(&s).ok_or_else(|| format!("unknown scaling '{s}'"))?)
            }
        };
        let order = Ordering::parse(&pick(Some(args.order.clone()), "order").unwrap())?;
        let factor = Factorization::parse(&pick(Some(args.factor.clone()), "factor").unwrap())?;
        let mode = match pick(Some(args.fp_mode.clone()), "fp-mode").unwrap().as_str() {
            "rounding" | "round" => RoundMode::Rounding,
            "truncation" | "trunc" => RoundMode::Truncation,
            other => return Err(format!("unknown fp mode '{other}'")),
        };
        let fp = FpSystem::new(args.fp_base.max(2), args.fp_digits.max(1), mode);
        let updates = match pick(args.updates.clone(), "updates") {
            None => Vec::new(),
            Some(s) => s
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| t.trim().parse::<usize>().map_err(|_| format!("bad update slot '{t}'")))
                .collect::<Result<_, _>>()?,
        };
        Ok(PipelineConfig {
            input,
            gen,
            scale,
            order,
            factor,
            fp,
            alpha: args.alpha,
            pivomin: args.pivomin,
            multmax: args.multmax,
            report: ReportFormat::parse(&args.report)?,
            seed: args.seed,
            updates,
            analyze: !args.no_analyze,
        })
    }
}

pub fn load_matrix(
    input: Option<&Path>,
    gen: Option<&str>,
) -> Result<(DenseMat<f64>, Vec<f64>, String), String> {
    match (input, gen) {
        (Some(path), _) => {
            let sp = sparsedirect::mm::read_mm(path).map_err(|e| format!("input: {e}"))?;
            if sp.rows() != sp.cols() {
                return Err(format!("input: matrix is {}x{}, need square", sp.rows(), sp.cols()));
            }
            let a = sp.to_dense();
            let b = a.matvec(&vec![1.0; a.cols()]).map_err(|e| e.to_string())?;
            Ok((a, b, path.display().to_string()))
        }
        (None, Some(spec)) => {
            let (kind, n) = spec
                .split_once(':')
                .or_else(|| spec.split_once(' '))
                .ok_or_else(|| format!("generator spec '{spec}' is not KIND:N"))?;
            let k =
                TestKind::parse(kind).ok_or_else(|| format!("unknown generator '{kind}'"))?;
            let n: usize = n.trim().parse().map_err(|_| format!("bad size '{n}'"))?;
            let (a, b) = gen_test(k, n);
            Ok((a, b, format!("{kind}:{n}")))
        }
        (None, None) => Err("no matrix source".into()),
    }
}

struct Report {
    format: ReportFormat,
    rows: Vec<(String, String)>,
}

impl Report {
    fn new(format: ReportFormat) -> Self {
        Report { format, rows: Vec::new() }
    }

    fn put(&mut self, key: &str, value: impl std::fmt::Display) {
        self.rows.push((key.to_string(), value.to_string()));
    }

    fn render(&self) -> String {
        let mut out = String::new();
        match self.format {
            ReportFormat::Text => {
                let width = self.rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                for (k, v) in &self.rows {
                    let _ = writeln!(out, "{k:width$}  {v}");
                }
            }
            ReportFormat::Csv => {
                out.push_str("key,value\n");
                for (k, v) in &self.rows {
                    let _ = writeln!(out, "{k},{v}");
                }
            }
        }
        out
    }
}

fn seeded(seed: u64) -> impl FnMut() -> f64 {
    let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).max(1);
    move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }
}

/// Executes the stages in the fixed order
/// scale → order → factor → solve → analyze → updates.
pub fn run(config: &PipelineConfig) -> Result<String, String> {
    let mut report = Report::new(config.report);
    let (a0, b0, label) =
        load_matrix(config.input.as_deref(), config.gen.as_deref())?;
    let n = a0.rows();
    report.put("matrix", &label);
    report.put("n", n);
    report.put("enn_input", a0.enn());

    // ---- scale ----
    let (a, b, col_scale) = match config.scale {
        None => (a0.clone(), b0.clone(), None),
        Some(method) => {
            let sc = scale(&a0, method, &config.fp).map_err(|e| format!("scale: {e}"))?;
            let scaled = sc.apply(&a0, &config.fp);
            let base = config.fp.base as f64;
            let eb: Vec<f64> = b0
                .iter()
                .enumerate()
                .map(|(i, &v)| v * base.powi(sc.row_exponents[i]))
                .collect();
            let before = expo_stats(&a0, &config.fp).map_err(|e| format!("scale: {e}"))?;
            let after = expo_stats(&scaled, &config.fp).map_err(|e| format!("scale: {e}"))?;
            report.put("scale_method", format!("{method:?}"));
            report.put("scale_diam_before", before.diam);
            report.put("scale_diam_after", after.diam);
            report.put("scale_mex_after", format!("{:.4}", after.mex));
            (scaled, eb, Some(sc.col_exponents.clone()))
        }
    };

    // ---- order ----
    let pattern = BoolPattern::from_dense(&a);
    if config.order.needs_symmetry() && !pattern.is_symmetric() {
        return Err(format!("order: {:?} requires a symmetric pattern", config.order));
    }
    let (rp, cp) = match config.order {
        Ordering::None => (Permutation::identity(n), Permutation::identity(n)),
        Ordering::Markowitz => {
            metric_pivot_order(&a, FillMetric::Markowitz, config.multmax, config.pivomin)
                .map_err(|e| format!("order: {e}"))?
        }
        Ordering::Tewarson => {
            metric_pivot_order(&a, FillMetric::Tewarson, config.multmax, config.pivomin)
                .map_err(|e| format!("order: {e}"))?
        }
        Ordering::P3 => {
            let r = p3_order(&pattern).map_err(|e| format!("order: {e}"))?;
            report.put("p3_spikes", r.spikes.len());
            report.put("p3_fillable_spikes", r.fillable_spikes().len());
            (r.row_perm, r.col_perm)
        }
        Ordering::P4 => {
            let bt = sparsedirect::blockform::p4(&pattern).map_err(|e| format!("order: {e}"))?;
            report.put(
                "p4_blocks",
                bt.block_sizes.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("+"),
            );
            (bt.row_perm, bt.col_perm)
        }
        Ordering::Orgm => {
            let g = UGraph::from_pattern(&pattern).map_err(|e| format!("order: {e}"))?;
            let q = orgm_order(&g);
            let p = Permutation::from_image(q).map_err(|e| format!("order: {e}"))?;
            (p.clone(), p)
        }
        Ordering::Dissection => {
            let g = UGraph::from_pattern(&pattern).map_err(|e| format!("order: {e}"))?;
            let d = dissection_order(&g, 8);
            let p = Permutation::from_image(d.order).map_err(|e| format!("order: {e}"))?;
            (p.clone(), p)
        }
    };
    let ap = permute_dense(
        &permute_dense(&a, &rp, Side::Left).map_err(|e| format!("order: {e}"))?,
        &cp,
        Side::Right,
    )
    .map_err(|e| format!("order: {e}"))?;
    let bp = rp.permute_vec(&b);
    report.put("ordering", format!("{:?}", config.order));

    // ---- factor + solve ----
    let enn_before = ap.enn();
    let (x_permuted, growth, fill, flops) = match config.factor {
        Factorization::Lu => {
            let pivoting = match config.order {
                Ordering::None | Ordering::Orgm | Ordering::Dissection => Pivoting::Partial,
                // pre-positioned pivots: keep them, fall back if singular
                _ => Pivoting::None,
            };
            let f = factor_gauss(&ap, pivoting, LuOptions::default())
                .or_else(|_| factor_gauss(&ap, Pivoting::Partial, LuOptions::default()))
                .map_err(|e| format!("factor: {e}"))?;
            let packed_enn = f.packed().enn();
            let x = f.solve(&bp).map_err(|e| format!("solve: {e}"))?;
            (x, f.growth, packed_enn.saturating_sub(enn_before), Some(f.flops))
        }
        Factorization::Cholesky => {
            if !pattern.is_symmetric() {
                return Err("factor: cholesky requires a symmetric matrix".into());
            }
            let c = sparsedirect::orthosym::cholesky(&ap).map_err(|e| format!("factor: {e}"))?;
            let x = c.solve(&bp).map_err(|e| format!("solve: {e}"))?;
            let growth = c.c.max_abs();
            let fill = (2 * c.c.enn()).saturating_sub(n) - enn_before.min(2 * c.c.enn() - n);
            (x, growth, fill, None)
        }
        Factorization::Qr => {
            let f = sparsedirect::orthosym::qr(&ap, sparsedirect::orthosym::QrMethod::Householder, false)
                .map_err(|e| format!("factor: {e}"))?;
            if let Some(&i) = f.rank_deficient_at.first() {
                return Err(format!("factor: rank deficiency at column {i}"));
            }
            let qtb = f.apply_qt(&bp);
            let x = sparsedirect::lufact::solve_upper(
                &f.r,
                &qtb[..n],
                sparsedirect::lufact::Access::ByRow,
            )
            .map_err(|e| format!("solve: {e}"))?;
            (x, f.r.max_abs(), f.r.enn().saturating_sub(enn_before), None)
        }
    };
    // undo the column permutation, then the column scaling substitution
    let mut x = vec![0.0f64; n];
    for j in 1..=n {
        x[cp.image(j) - 1] = x_permuted[j - 1];
    }
    if let Some(d) = &col_scale {
        let base = config.fp.base as f64;
        for (j, xj) in x.iter_mut().enumerate() {
            *xj *= base.powi(d[j]);
        }
    }
    let ax = a0.matvec(&x).map_err(|e| e.to_string())?;
    let resid: Vec<f64> = ax.iter().zip(&b0).map(|(l, r)| l - r).collect();
    let rel = vec_norm(&resid, PNorm::Inf) / vec_norm(&b0, PNorm::Inf).max(1e-300);
    report.put("factorization", format!("{:?}", config.factor));
    report.put("fill", fill);
    report.put("growth_g", format!("{growth:.6e}"));
    if let Some(FlopCounts { divisions, mult_subs }) = flops {
        report.put("flops_divisions", divisions);
        report.put("flops_mult_subs", mult_subs);
    }
    report.put("solution_first", format!("{:.12}", x[0]));
    report.put(
        "solution",
        x.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join(" "),
    );
    report.put("residual_inf_rel", format!("{rel:.3e}"));

    // ---- analyze ----
    if config.analyze {
        let n1 = norm(&a0, PNorm::One).value;
        let ninf = norm(&a0, PNorm::Inf).value;
        report.put("norm1", format!("{n1:.6}"));
        report.put("norm_inf", format!("{ninf:.6}"));
        match (cond(&a0, PNorm::One), cond(&a0, PNorm::Inf)) {
            (Ok(c1), Ok(ci)) => {
                report.put("cond1", format!("{c1:.6}"));
                report.put("cond_inf", format!("{ci:.6}"));
            }
            _ => report.put("cond", "singular"),
        }
        let u = config.fp.unit_roundoff();
        report.put("fp_unit_roundoff", format!("{u:.3e}"));
        report.put(
            "wilkinson_bound",
            format!("{:.6e}", wilkinson_bound(n, growth, u)),
        );
        // block-angular potential: local-search 2-coloring of the rows
        let start: Vec<usize> = (0..n).map(|i| 1 + i % 2).collect();
        let coloring =
            sparsedirect::blockform::improve_partition(&pattern, &start, 2, config.alpha, 200)
                .map_err(|e| format!("analyze: {e}"))?;
        let pc = sparsedirect::blockform::partition_cost(&pattern, &coloring, 2, config.alpha)
            .map_err(|e| format!("analyze: {e}"))?;
        report.put("partition_coupling_cols", pc.coupling);
        report.put("partition_cost", format!("{:.3}", pc.total));
    }

    // ---- updates ----
    if !config.updates.is_empty() {
        let mut basis = BgBasis::new(&a0).map_err(|e| format!("updates: {e}"))?;
        let mut rng = seeded(config.seed.wrapping_add(1));
        for (step, &slot) in config.updates.iter().enumerate() {
            if slot < 1 || slot > n {
                return Err(format!("updates: slot {slot} out of range 1..={n}"));
            }
            let col: Vec<f64> = (0..n).map(|_| rng()).collect();
            basis.update(&col, slot).map_err(|e| format!("updates: {e}"))?;
            let current = basis.current_matrix();
            let ones = vec![1.0; n];
            let rhs = current.matvec(&ones).map_err(|e| e.to_string())?;
            let sol = basis.solve(&rhs).map_err(|e| format!("updates: {e}"))?;
            let err = sol.iter().map(|v| (v - 1.0).abs()).fold(0.0f64, f64::max);
            report.put(&format!("update_{}_slot_{}_err", step + 1, slot), format!("{err:.3e}"));
        }
        report.put("updates_applied", config.updates.len());
    }

    Ok(report.render())
}

/// The norm/condition table of the analyze subcommand.
pub fn analyze_report(
    a: &DenseMat<f64>,
    label: &str,
    format: ReportFormat,
) -> Result<String, String> {
    let mut report = Report::new(format);
    report.put("matrix", label);
    report.put("n", a.rows());
    report.put("enn", a.enn());
    let n1 = norm(a, PNorm::One);
    let ni = norm(a, PNorm::Inf);
    report.put("norm1", format!("{:.6}", n1.value));
    report.put(
        "norm1_witness",
        n1.witness.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(" "),
    );
    report.put("norm_inf", format!("{:.6}", ni.value));
    report.put(
        "norm_inf_witness",
        ni.witness.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(" "),
    );
    match (cond(a, PNorm::One), cond(a, PNorm::Inf)) {
        (Ok(c1), Ok(ci)) => {
            report.put("cond1", format!("{c1:.6}"));
            report.put("cond_inf", format!("{ci:.6}"));
        }
        _ => report.put("cond", "singular"),
    }
    Ok(report.render())
}
