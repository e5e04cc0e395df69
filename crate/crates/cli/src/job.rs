//! Job description: JSON file and command-line flags, merged and validated.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Expand,
    Approx,
    Poles,
    Fabry,
    Montessus,
    CompareClassical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureName {
    /// Chebyshev measure of the first kind on an interval.
    Chebyshev1,
    /// Normalized arc length on the unit circle.
    Circle,
    /// Measure given by monic recurrence coefficients.
    Recurrence,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Precision {
    /// IEEE double.
    #[default]
    Double,
    /// About 32 significant digits.
    DoubleDouble,
    /// 256-bit software float, about 77 significant digits.
    Wide,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureConfig {
    pub kind: MeasureName,
    /// `[a, b]`; defaults to `[-1, 1]` for the Chebyshev measure.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<[f64; 2]>,
    /// Monic recurrence pairs `[alpha_k, beta_k]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recurrence: Option<Vec<[f64; 2]>>,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        Self {
            kind: MeasureName::Chebyshev1,
            interval: None,
            recurrence: None,
        }
    }
}

/// Job as read from a file; every field optional so that flags can fill in.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobFile {
    pub command: Option<Command>,
    pub function: Option<String>,
    pub measure: Option<MeasureConfig>,
    pub n: Option<usize>,
    pub n_min: Option<usize>,
    pub n_max: Option<usize>,
    pub m: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub format: Option<Format>,
    pub precision: Option<Precision>,
    /// Laurent sampling radius (expression).
    pub radius: Option<String>,
    /// Roots of the true denominator (expressions).
    pub known_poles: Option<Vec<String>>,
    /// `ρ_m(F)` (expression); infinite when absent.
    pub rho_m: Option<String>,
    /// Number of Chebyshev points of the support used as the sup-norm set.
    pub points: Option<usize>,
    /// Point for the second-kind diagnostic (expression).
    pub second_kind_z: Option<String>,
}

/// Command-line flags; each overrides the corresponding job-file field.
#[derive(Clone, Debug, Default, Args)]
pub struct JobFlags {
    /// Function of z (or x), e.g. "1/(z-2) + sqrt(3-z)".
    #[arg(long)]
    pub function: Option<String>,
    #[arg(long, value_enum)]
    pub measure: Option<MeasureName>,
    /// Support interval "a,b".
    #[arg(long, value_parser = parse_interval, allow_hyphen_values = true)]
    pub interval: Option<[f64; 2]>,
    /// Recurrence pairs "alpha0:beta0,alpha1:beta1,...".
    #[arg(long, value_parser = parse_recurrence, allow_hyphen_values = true)]
    pub recurrence: Option<Vec<[f64; 2]>>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub n_min: Option<usize>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, short = 'o')]
    pub output_dir: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, value_enum)]
    pub precision: Option<Precision>,
    #[arg(long, allow_hyphen_values = true)]
    pub radius: Option<String>,
    /// Comma-separated roots of the true denominator.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub known_poles: Option<Vec<String>>,
    #[arg(long)]
    pub rho_m: Option<String>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub second_kind_z: Option<String>,
}

fn parse_interval(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err("expected \"a,b\"".into());
    }
    let a = parts[0].parse::<f64>().map_err(|e| e.to_string())?;
    let b = parts[1].parse::<f64>().map_err(|e| e.to_string())?;
    Ok([a, b])
}

fn parse_recurrence(s: &str) -> Result<Vec<[f64; 2]>, String> {
    s.split(',')
        .map(|pair| {
            let (a, b) = pair
                .split_once(':')
                .ok_or_else(|| format!("expected alpha:beta, got {pair:?}"))?;
            Ok([
                a.trim().parse::<f64>().map_err(|e| e.to_string())?,
                b.trim().parse::<f64>().map_err(|e| e.to_string())?,
            ])
        })
        .collect()
}

impl JobFile {
    /// Applies flags on top of the file contents.
    pub fn merge(mut self, command: Option<Command>, flags: JobFlags) -> Self {
        macro_rules! over {
            ($($f:ident),*) => { $( if flags.$f.is_some() { self.$f = flags.$f; } )* };
        }
        if command.is_some() {
            self.command = command;
        }
        over!(
            function,
            n,
            n_min,
            n_max,
            m,
            output_dir,
            format,
            precision,
            radius,
            known_poles,
            rho_m,
            points,
            second_kind_z
        );
        if flags.measure.is_some() || flags.interval.is_some() || flags.recurrence.is_some() {
            let mut mc = self.measure.take().unwrap_or_default();
            if let Some(kind) = flags.measure {
                if kind != mc.kind {
                    mc = MeasureConfig {
                        kind,
                        interval: None,
                        recurrence: None,
                    };
                }
            }
            if flags.interval.is_some() {
                mc.interval = flags.interval;
            }
            if flags.recurrence.is_some() {
                mc.recurrence = flags.recurrence;
            }
            self.measure = Some(mc);
        }
        self
    }

    /// Checks the command-specific required fields, collecting every problem.
    pub fn validate(self) -> Result<Job, Vec<String>> {
        let mut errs = Vec::new();
        let Some(command) = self.command else {
            return Err(vec![
                "command: missing (give it as the first argument or in the job file)".into(),
            ]);
        };
        let need = |name: &str, present: bool, errs: &mut Vec<String>| {
            if !present {
                errs.push(format!("{name}: required for `{}`", command_name(command)));
            }
        };
        need("function", self.function.is_some(), &mut errs);
        match command {
            Command::Expand | Command::Fabry => need("n_max", self.n_max.is_some(), &mut errs),
            Command::Approx | Command::CompareClassical => {
                need("n", self.n.is_some(), &mut errs);
                need("m", self.m.is_some(), &mut errs);
            }
            Command::Poles => {
                need("m", self.m.is_some(), &mut errs);
                need("n_max", self.n_max.is_some(), &mut errs);
            }
            Command::Montessus => {
                need("m", self.m.is_some(), &mut errs);
                need("n_max", self.n_max.is_some(), &mut errs);
                need("known_poles", self.known_poles.is_some(), &mut errs);
                if let (Some(m), Some(k)) = (self.m, &self.known_poles) {
                    if k.len() != m {
                        errs.push(format!("known_poles: expected {m} entries, got {}", k.len()));
                    }
                }
            }
        }
        if matches!(command, Command::CompareClassical | Command::Poles | Command::Montessus) && self.m == Some(0) {
            errs.push("m: must be at least 1".into());
        }
        if let (Some(lo), Some(hi)) = (self.n_min, self.n_max) {
            if lo > hi {
                errs.push(format!(
                    "n_min: {lo} exceeds n_max {hi} (range must be nonempty and ascending)"
                ));
            }
        }
        if self.points == Some(0) {
            errs.push("points: must be positive".into());
        }
        let measure = self.measure.clone().unwrap_or_default();
        match measure.kind {
            MeasureName::Recurrence if measure.recurrence.as_ref().is_none_or(|r| r.is_empty()) => {
                errs.push("measure.recurrence: required for the recurrence measure".into())
            }
            MeasureName::Circle if measure.interval.is_some() => {
                errs.push("measure.interval: not applicable to the circle measure".into())
            }
            _ => {}
        }
        if let Some([a, b]) = measure.interval {
            if !(a < b) {
                errs.push(format!("measure.interval: need a < b, got [{a}, {b}]"));
            }
        }
        if let Some(src) = &self.function {
            if let Err(e) = pade_ortho::expr::parse(src) {
                errs.push(format!("function: {e}"));
            }
        }
        for (name, v) in [
            ("radius", &self.radius),
            ("rho_m", &self.rho_m),
            ("second_kind_z", &self.second_kind_z),
        ] {
            if let Some(src) = v {
                if let Err(e) = crate::run::constant::<f64>(src) {
                    errs.push(format!("{name}: {e}"));
                }
            }
        }
        for src in self.known_poles.iter().flatten() {
            if let Err(e) = crate::run::constant::<f64>(src) {
                errs.push(format!("known_poles: {e}"));
            }
        }
        if !errs.is_empty() {
            return Err(errs);
        }
        Ok(Job {
            command,
            function: self.function.unwrap(),
            measure,
            n: self.n,
            n_min: self.n_min,
            n_max: self.n_max,
            m: self.m,
            output_dir: self.output_dir.unwrap_or_else(|| PathBuf::from("out")),
            format: self.format.unwrap_or_default(),
            precision: self.precision.unwrap_or_default(),
            radius: self.radius,
            known_poles: self.known_poles.unwrap_or_default(),
            rho_m: self.rho_m,
            points: self.points.unwrap_or(21),
            second_kind_z: self.second_kind_z,
        })
    }
}

pub fn command_name(c: Command) -> &'static str {
    match c {
        Command::Expand => "expand",
        Command::Approx => "approx",
        Command::Poles => "poles",
        Command::Fabry => "fabry",
        Command::Montessus => "montessus",
        Command::CompareClassical => "compare-classical",
    }
}

/// Validated job.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Job {
    pub command: Command,
    pub function: String,
    pub measure: MeasureConfig,
    pub n: Option<usize>,
    pub n_min: Option<usize>,
    pub n_max: Option<usize>,
    pub m: Option<usize>,
    pub output_dir: PathBuf,
    pub format: Format,
    pub precision: Precision,
    pub radius: Option<String>,
    pub known_poles: Vec<String>,
    pub rho_m: Option<String>,
    pub points: usize,
    pub second_kind_z: Option<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_lists_every_field() {
        let schema: serde_json::Value = serde_json::from_str(include_str!("../job.schema.json")).unwrap();
        let mut listed: Vec<&String> = schema["properties"].as_object().unwrap().keys().collect();
        let value = serde_json::to_value(JobFile::default()).unwrap();
        let mut fields: Vec<&String> = value.as_object().unwrap().keys().collect();
        listed.sort();
        fields.sort();
        assert_eq!(listed, fields);
    }

    fn base() -> JobFile {
        JobFile {
            command: Some(Command::Approx),
            function: Some("1/(z-2)".into()),
            n: Some(3),
            m: Some(1),
            ..Default::default()
        }
    }

    #[test]
    fn flags_override_file() {
        let flags = JobFlags {
            n: Some(7),
            interval: Some([0.0, 2.0]),
            ..Default::default()
        };
        let job = base().merge(None, flags).validate().unwrap();
        assert_eq!(job.n, Some(7));
        assert_eq!(job.m, Some(1));
        assert_eq!(job.measure.interval, Some([0.0, 2.0]));
        assert_eq!(job.measure.kind, MeasureName::Chebyshev1);
    }

    #[test]
    fn errors_are_aggregated() {
        let mut f = base();
        f.m = None;
        f.function = Some("1/(z-".into());
        let errs = f.validate().unwrap_err();
        assert_eq!(errs.len(), 2, "{errs:?}");
        assert!(errs.iter().any(|e| e.starts_with("m:")));
        assert!(errs.iter().any(|e| e.starts_with("function:")));
    }

    #[test]
    fn job_file_round_trip() {
        let json = r#"{"command":"compare-classical","function":"1/(z-2)","n":4,"m":1,
                       "measure":{"kind":"chebyshev1","interval":[-1,1]}}"#;
        let f: JobFile = serde_json::from_str(json).unwrap();
        assert_eq!(f.command, Some(Command::CompareClassical));
        assert!(f.validate().is_ok());
        assert!(serde_json::from_str::<JobFile>(r#"{"bogus":1}"#).is_err());
    }

    #[test]
    fn recurrence_flag_parses() {
        assert_eq!(parse_recurrence("0:1, 0:0.5").unwrap(), vec![[0.0, 1.0], [0.0, 0.5]]);
        assert!(parse_recurrence("0;1").is_err());
        assert_eq!(parse_interval("-2,3").unwrap(), [-2.0, 3.0]);
    }
}
