//! Executes a validated job in the requested precision and renders its
//! output files in memory.

use num_complex::Complex;
use serde_json::{json, Value};

use pade_ortho::classic::compare_theorem6;
use pade_ortho::conformal::ConformalMap;
use pade_ortho::export::{
    pair, ApproximantRecord, CorrespondenceRecord, FabryRecord, LambdaRecord, MontessusRecord, PoleTrackRecord,
};
use pade_ortho::expr::{parse, Expr, FuncExpr};
use pade_ortho::inverse::{chebyshev_points, fabry_ratio, lambda_ratio, montessus_report, pole_track, KnownPoles};
use pade_ortho::measure::{default_node_count, make_basis, MeasureSpec, OrthoBasis, QuadratureRule};
use pade_ortho::padeortho::approximant;
use pade_ortho::scalar::cis_pi_ratio;
use pade_ortho::series::{fourier_coeffs, laurent_coeffs, laurent_radius, rho0_estimate, second_kind_defect, Rho0};
use pade_ortho::{DoubleDouble, Error, Float256, Real};

use crate::job::{Command, Format, Job, MeasureConfig, MeasureName, Precision};

/// Why a run failed.
#[derive(Debug)]
pub enum RunError {
    /// The request cannot be served as posed (exit 2).
    Validation(String),
    /// The numerics failed (exit 3).
    Numerical(String),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            RunError::Validation(e.to_string())
        } else {
            RunError::Numerical(e.to_string())
        }
    }
}

/// A rendered output file.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub name: String,
    pub contents: String,
}

type RunResult<T> = Result<T, RunError>;

/// Evaluates a constant expression (no `z`).
pub fn constant<T: Real>(src: &str) -> Result<Complex<T>, String> {
    let e = parse(src).map_err(|e| e.to_string())?;
    if uses_var(e.ast()) {
        return Err(format!("{src:?} must be a constant"));
    }
    e.eval(Complex::new(T::zero(), T::zero())).map_err(|e| e.to_string())
}

fn uses_var(e: &Expr) -> bool {
    match e {
        Expr::Var => true,
        Expr::Num(_) | Expr::Const(_) => false,
        Expr::Neg(a) => uses_var(a),
        Expr::Bin { lhs, rhs, .. } => uses_var(lhs) || uses_var(rhs),
        Expr::Pow { base, .. } => uses_var(base),
        Expr::Call { arg, .. } => uses_var(arg),
    }
}

pub fn execute(job: &Job) -> RunResult<Vec<Output>> {
    match job.precision {
        Precision::Double => Runner::<f64>::new(job)?.run(),
        Precision::DoubleDouble => Runner::<DoubleDouble>::new(job)?.run(),
        Precision::Wide => Runner::<Float256>::new(job)?.run(),
    }
}

fn build_measure<T: Real>(cfg: &MeasureConfig) -> Result<MeasureSpec<T>, Error> {
    let lit = |x: f64| T::lit(x);
    match cfg.kind {
        MeasureName::Chebyshev1 => {
            let [a, b] = cfg.interval.unwrap_or([-1.0, 1.0]);
            MeasureSpec::chebyshev(lit(a), lit(b))
        }
        MeasureName::Circle => Ok(MeasureSpec::circle()),
        MeasureName::Recurrence => {
            let pairs = cfg
                .recurrence
                .as_ref()
                .map(|r| r.iter().map(|&[a, b]| (lit(a), lit(b))).collect())
                .unwrap_or_default();
            MeasureSpec::recurrence(pairs, cfg.interval.map(|[a, b]| (lit(a), lit(b))))
        }
    }
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Converts CSV text into a JSON array of row objects.
fn csv_to_json(csv: &str) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap_or("").split(',').collect();
    let rows: Vec<Value> = lines
        .map(|line| {
            let obj: serde_json::Map<String, Value> = header
                .iter()
                .zip(line.split(','))
                .map(|(k, v)| {
                    let val = v
                        .parse::<i64>()
                        .map(Value::from)
                        .or_else(|_| v.parse::<f64>().map(|x| json!(x)))
                        .unwrap_or_else(|_| Value::from(v));
                    (k.to_string(), val)
                })
                .collect();
            Value::Object(obj)
        })
        .collect();
    json_text(&Value::Array(rows))
}

fn rho0_value<T: Real>(r: &Result<Rho0<T>, Error>) -> Value {
    match r {
        Ok(Rho0::Finite(v)) => json!(v.to_f64_lossy()),
        Ok(Rho0::Infinite) => json!("infinite"),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

struct Runner<'a, T: Real> {
    job: &'a Job,
    f: FuncExpr,
    measure: MeasureSpec<T>,
    map: ConformalMap<T>,
    outputs: Vec<Output>,
}

impl<'a, T: Real> Runner<'a, T> {
    fn new(job: &'a Job) -> RunResult<Self> {
        let f = parse(&job.function).map_err(|e| RunError::Validation(format!("function: {e}")))?;
        let measure = build_measure::<T>(&job.measure)?;
        let map = measure.conformal_map();
        Ok(Self {
            job,
            f,
            measure,
            map,
            outputs: Vec::new(),
        })
    }

    fn constant(&self, name: &str, src: &str) -> RunResult<Complex<T>> {
        constant::<T>(src).map_err(|e| RunError::Validation(format!("{name}: {e}")))
    }

    fn basis(&self, n_max: usize) -> RunResult<OrthoBasis<T>> {
        Ok(make_basis(&self.measure, n_max)?)
    }

    fn table(&mut self, stem: &str, csv: String) {
        let (name, contents) = match self.job.format {
            Format::Csv => (format!("{stem}.csv"), csv),
            Format::Json => (format!("{stem}.json"), csv_to_json(&csv)),
        };
        self.outputs.push(Output { name, contents });
    }

    fn json(&mut self, name: &str, v: Value) {
        self.outputs.push(Output {
            name: name.to_string(),
            contents: json_text(&v),
        });
    }

    fn req(v: Option<usize>, name: &str) -> RunResult<usize> {
        v.ok_or_else(|| RunError::Validation(format!("{name}: required")))
    }

    fn run(mut self) -> RunResult<Vec<Output>> {
        match self.job.command {
            Command::Expand => self.expand()?,
            Command::Approx => self.approx()?,
            Command::Poles => self.poles()?,
            Command::Fabry => self.fabry()?,
            Command::Montessus => self.montessus()?,
            Command::CompareClassical => self.compare()?,
        }
        Ok(self.outputs)
    }

    fn expand(&mut self) -> RunResult<()> {
        let n_max = Self::req(self.job.n_max, "n_max")?;
        let basis = self.basis(n_max)?;
        let series = fourier_coeffs(&self.f, &basis, n_max)?;
        let rho0 = rho0_estimate(&series);
        let rule = QuadratureRule::for_measure(&self.measure, default_node_count(n_max, 0))?;
        let orth = basis.orthonormality_defect(&rule).to_f64_lossy();
        self.table("coeffs", series.to_csv());
        let mut summary = json!({
            "n_max": n_max,
            "rho0": rho0_value(&rho0),
            "reliable_upto": series.reliable_upto,
            "noise_floor": series.noise_floor.to_f64_lossy(),
            "orthonormality_defect": orth,
        });
        if let Some(src) = &self.job.second_kind_z {
            let z = self.constant("second_kind_z", src)?;
            let ns: Vec<usize> = if n_max >= 10 {
                (1..=n_max / 10).map(|k| 10 * k).collect()
            } else {
                vec![n_max]
            };
            let mut csv = String::from("n,defect\n");
            let mut defects = Vec::new();
            for &n in &ns {
                let d = second_kind_defect(&basis, &self.map, n, z)?.to_f64_lossy();
                csv.push_str(&format!("{n},{d:.16e}\n"));
                defects.push(d);
            }
            let decreasing = defects.windows(2).all(|w| w[1] < w[0]);
            summary["second_kind"] = json!({
                "z": pair(z),
                "dlog_phi": pair(self.map.dlog_phi(z)),
                "ns": ns,
                "defects": defects,
                "decreasing": decreasing,
            });
            self.table("second_kind", csv);
        }
        self.json("summary.json", summary);
        Ok(())
    }

    fn approx(&mut self) -> RunResult<()> {
        let n = Self::req(self.job.n, "n")?;
        let m = Self::req(self.job.m, "m")?;
        let basis = self.basis(n + m)?;
        let a = approximant(&self.f, &basis, n, m)?;
        let v = serde_json::to_value(ApproximantRecord::from(&a)).expect("serializable");
        self.json("approximant.json", v);
        Ok(())
    }

    fn row_range(&self, m: usize) -> RunResult<Vec<usize>> {
        let hi = Self::req(self.job.n_max, "n_max")?;
        let lo = self.job.n_min.unwrap_or(m);
        if lo > hi {
            return Err(RunError::Validation(format!("n_min {lo} exceeds n_max {hi}")));
        }
        Ok((lo..=hi).collect())
    }

    fn poles(&mut self) -> RunResult<()> {
        let m = Self::req(self.job.m, "m")?;
        let ns = self.row_range(m)?;
        let basis = self.basis(ns[ns.len() - 1] + m)?;
        let track = pole_track(&self.f, &basis, &self.map, m, &ns)?;
        self.table("poles", track.to_csv());
        let v = serde_json::to_value(PoleTrackRecord::from(&track)).expect("serializable");
        self.json("summary.json", v);
        Ok(())
    }

    fn fabry(&mut self) -> RunResult<()> {
        let n_max = Self::req(self.job.n_max, "n_max")?;
        let basis = self.basis(n_max)?;
        let series = fourier_coeffs(&self.f, &basis, n_max)?;
        let report = fabry_ratio(&series, &self.map)?;
        self.table("fabry", report.to_csv());
        let mut summary = serde_json::to_value(FabryRecord::from(&report)).expect("serializable");

        let lo = self.job.n_min.unwrap_or(0);
        match lambda_ratio(&self.f, &basis, &self.map, lo..=n_max) {
            Ok(mut l) => {
                l.cross_check(&report);
                self.table("lambda", l.to_csv());
                summary["lambda"] = serde_json::to_value(LambdaRecord::from(&l)).expect("serializable");
            }
            Err(e) => summary["lambda"] = json!({ "error": e.to_string() }),
        }

        let radius = match &self.job.radius {
            Some(src) => self.constant("radius", src)?.re,
            None => laurent_radius(rho0_estimate(&series).unwrap_or(Rho0::Infinite)),
        };
        summary["laurent_radius"] = json!(radius.to_f64_lossy());
        let laurent = laurent_coeffs(&self.f, &self.map, radius, n_max).and_then(|s| fabry_ratio(&s, &self.map));
        match laurent {
            Ok(lr) => {
                let mut csv = String::from("n,abs_tau_fourier_minus_tau_laurent\n");
                for (n, t) in report.ns.iter().zip(&report.tau_seq) {
                    if let Some(tl) = lr.tau_at(*n) {
                        csv.push_str(&format!("{n},{:.16e}\n", (*t - tl).norm().to_f64_lossy()));
                    }
                }
                self.table("laurent", lr.to_csv());
                self.table("ratio_gap", csv);
                summary["laurent"] = serde_json::to_value(FabryRecord::from(&lr)).expect("serializable");
            }
            Err(e) => summary["laurent"] = json!({ "error": e.to_string() }),
        }
        self.json("summary.json", summary);
        Ok(())
    }

    fn montessus(&mut self) -> RunResult<()> {
        let m = Self::req(self.job.m, "m")?;
        let ns = self.row_range(m)?;
        let basis = self.basis(ns[ns.len() - 1] + m)?;
        let roots = self
            .job
            .known_poles
            .iter()
            .map(|s| self.constant("known_poles", s))
            .collect::<RunResult<Vec<_>>>()?;
        let rho_m = match &self.job.rho_m {
            Some(src) => self.constant("rho_m", src)?.re,
            None => T::infinity(),
        };
        let k = self.job.points;
        let points = match self.measure.interval() {
            Some((a, b)) => chebyshev_points(a, b, k),
            None => (0..k).map(|j| cis_pi_ratio::<T>(2 * j as i64, k as i64)).collect(),
        };
        let known = KnownPoles { roots, rho_m };
        let report = montessus_report(&self.f, &known, &basis, &self.map, m, &ns, &points)?;
        self.table("montessus", report.to_csv());
        let v = serde_json::to_value(MontessusRecord::from(&report)).expect("serializable");
        self.json("summary.json", v);
        Ok(())
    }

    fn compare(&mut self) -> RunResult<()> {
        let n = Self::req(self.job.n, "n")?;
        let m = Self::req(self.job.m, "m")?;
        let basis = self.basis(n + m)?;
        let radius = match &self.job.radius {
            Some(src) => self.constant("radius", src)?.re,
            None => {
                let series = fourier_coeffs(&self.f, &basis, n + m)?;
                laurent_radius(rho0_estimate(&series).unwrap_or(Rho0::Infinite))
            }
        };
        let pc = compare_theorem6(&self.f, &basis, &self.map, n, m, radius)?;
        self.table("compare", pc.to_csv());
        let mut v = serde_json::to_value(CorrespondenceRecord::from(&pc)).expect("serializable");
        v["laurent_radius"] = json!(radius.to_f64_lossy());
        self.json("summary.json", v);
        Ok(())
    }
}
