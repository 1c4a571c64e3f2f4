//! Grid evaluation and CSV emission.

use std::fmt::Write as _;
use std::io;
use std::str::FromStr;

use dimdot_core::{
    correlation_report, density_matrix, eigensystem_analytic, rectification, transition_table, BathSpec, Bias,
    Error as CoreError, Grouping, MeasurementSearch, Orientation, SystemParams, TransportReport,
};
use rayon::prelude::*;

use crate::config::{RunConfig, Splitting, Temperatures, Var};

/// Output quantities that can be selected with `columns = …`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Column {
    TLeft,
    TRight,
    /// Zero-based state index.
    Population(usize),
    JLeft,
    JRight,
    JPlus,
    JMinus,
    Rectification,
    StatePlus(usize),
    StateMinus(usize),
    StateNet(usize),
    Concurrence,
    Discord,
    MutualInformation,
    ClassicalCorrelation,
}

impl Column {
    pub fn all() -> Vec<Column> {
        let mut cols = vec![Column::TLeft, Column::TRight];
        cols.extend((0..4).map(Column::Population));
        cols.extend([Column::JLeft, Column::JRight, Column::JPlus, Column::JMinus, Column::Rectification]);
        cols.extend((0..4).map(Column::StatePlus));
        cols.extend((0..4).map(Column::StateMinus));
        cols.extend((0..4).map(Column::StateNet));
        cols.extend([Column::Concurrence, Column::Discord, Column::MutualInformation, Column::ClassicalCorrelation]);
        cols
    }

    pub fn name(self) -> String {
        match self {
            Column::TLeft => "T_L".into(),
            Column::TRight => "T_R".into(),
            Column::Population(n) => format!("p{}", n + 1),
            Column::JLeft => "J_L".into(),
            Column::JRight => "J_R".into(),
            Column::JPlus => "J_plus".into(),
            Column::JMinus => "J_minus".into(),
            Column::Rectification => "R".into(),
            Column::StatePlus(n) => format!("J_plus_{}", n + 1),
            Column::StateMinus(n) => format!("J_minus_{}", n + 1),
            Column::StateNet(n) => format!("J_net_{}", n + 1),
            Column::Concurrence => "concurrence".into(),
            Column::Discord => "discord".into(),
            Column::MutualInformation => "MI".into(),
            Column::ClassicalCorrelation => "C_cor".into(),
        }
    }

    /// Energies in units of J, currents in J² (ħ = k_B = 1), correlations in bits.
    pub fn unit(self) -> &'static str {
        match self {
            Column::TLeft | Column::TRight => "J",
            Column::Population(_) | Column::Rectification | Column::Concurrence => "1",
            Column::JLeft
            | Column::JRight
            | Column::JPlus
            | Column::JMinus
            | Column::StatePlus(_)
            | Column::StateMinus(_)
            | Column::StateNet(_) => "J^2",
            Column::Discord | Column::MutualInformation | Column::ClassicalCorrelation => "bit",
        }
    }

    fn needs_transport(self) -> bool {
        matches!(
            self,
            Column::JPlus
                | Column::JMinus
                | Column::Rectification
                | Column::StatePlus(_)
                | Column::StateMinus(_)
                | Column::StateNet(_)
        )
    }

    fn needs_correlations(self) -> bool {
        matches!(
            self,
            Column::Concurrence | Column::Discord | Column::MutualInformation | Column::ClassicalCorrelation
        )
    }
}

impl FromStr for Column {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Column::all()
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown column `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// A transition gap is below the degeneracy floor.
    Skipped,
    /// Disconnected transition graph.
    Ambiguous,
    Invalid,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Skipped => "skipped",
            Status::Ambiguous => "ambiguous",
            Status::Invalid => "invalid",
        }
    }

    fn from_error(e: &CoreError) -> Self {
        match e {
            CoreError::Degenerate { .. } => Status::Skipped,
            CoreError::AmbiguousSteadyState => Status::Ambiguous,
            _ => Status::Invalid,
        }
    }
}

/// One grid point. `values` is aligned with the column list it was computed for.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub inputs: Vec<(Var, f64)>,
    pub values: Vec<f64>,
    pub status: Status,
}

impl ResultRow {
    pub fn input(&self, var: Var) -> Option<f64> {
        self.inputs.iter().find(|(v, _)| *v == var).map(|(_, x)| *x)
    }
}

/// Fully resolved parameters of one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub params: SystemParams,
    pub baths: BathSpec,
}

fn lookup(inputs: &[(Var, f64)], var: Var) -> Option<f64> {
    inputs.iter().find(|(v, _)| *v == var).map(|(_, x)| *x)
}

/// Combines the fixed values of `cfg` with the varied `inputs`.
pub fn resolve(cfg: &RunConfig, inputs: &[(Var, f64)]) -> Result<Point, CoreError> {
    let get = |fixed: Option<f64>, var: Var| fixed.or_else(|| lookup(inputs, var)).expect("validated config");
    let field = get(cfg.field, Var::B);
    let splitting = match cfg.splitting {
        Splitting::Fixed(b) => b,
        Splitting::Linked => field,
        Splitting::Free => get(None, Var::SmallB),
    };
    let params = SystemParams::new(
        cfg.exchange,
        get(cfg.anisotropy, Var::Chi),
        get(cfg.dm, Var::D),
        field,
        splitting,
    )?;
    let (t_left, t_right) = match cfg.temperatures {
        Temperatures::Bias { mean, delta } => {
            let mean = mean.expect("validated config");
            let delta = get(delta, Var::DT);
            (mean + delta / 2.0, mean - delta / 2.0)
        }
        Temperatures::Explicit { left, right } => (left.expect("validated config"), get(right, Var::TR)),
    };
    let baths = BathSpec::new(t_left, t_right, cfg.gamma_left, cfg.gamma_right)?;
    Ok(Point { params, baths })
}

/// Grid in row order: series outermost, then `sweep`, then `sweep2`.
pub fn grid(cfg: &RunConfig) -> Vec<Vec<(Var, f64)>> {
    let mut axes: Vec<(Var, Vec<f64>)> = Vec::new();
    if let Some(s) = &cfg.series {
        axes.push((s.var, s.values.clone()));
    }
    for s in &cfg.sweeps {
        axes.push((s.var, s.values()));
    }
    let mut points = vec![Vec::new()];
    for (var, values) in axes {
        points = points
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |&x| {
                    let mut p = prefix.clone();
                    p.push((var, x));
                    p
                })
            })
            .collect();
    }
    points
}

pub fn selected_columns(cfg: &RunConfig) -> Vec<Column> {
    cfg.columns.clone().unwrap_or_else(Column::all)
}

/// Evaluates one point for the given columns. Quantities that are undefined
/// at an otherwise valid point (rectification at zero bias) are NaN.
pub fn evaluate(point: &Point, columns: &[Column]) -> Result<Vec<f64>, CoreError> {
    let es = eigensystem_analytic(&point.params)?;
    let tt = transition_table(&es, None);
    let state = Orientation::solve(&tt, &point.baths, Grouping::default())?;

    let transport: Option<TransportReport> = if columns.iter().any(|c| c.needs_transport()) {
        let b = &point.baths;
        let bias = Bias::new(
            0.5 * (b.t_left + b.t_right),
            b.t_left - b.t_right,
            b.gamma_left,
            b.gamma_right,
        );
        match rectification(&point.params, &bias) {
            Ok(r) => Some(r),
            Err(CoreError::ZeroBias | CoreError::NoCurrent) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let correlations = columns
        .iter()
        .any(|c| c.needs_correlations())
        .then(|| correlation_report(&density_matrix(&state.populations, &es), &MeasurementSearch::default()));

    let t = |f: fn(&TransportReport) -> f64| transport.as_ref().map_or(f64::NAN, f);
    Ok(columns
        .iter()
        .map(|col| match *col {
            Column::TLeft => point.baths.t_left,
            Column::TRight => point.baths.t_right,
            Column::Population(n) => state.populations[n],
            Column::JLeft => state.j_left,
            Column::JRight => state.j_right,
            Column::JPlus => t(|r| r.j_plus),
            Column::JMinus => t(|r| r.j_minus),
            Column::Rectification => t(|r| r.rectification),
            Column::StatePlus(n) => transport.as_ref().map_or(f64::NAN, |r| r.per_state[n].plus),
            Column::StateMinus(n) => transport.as_ref().map_or(f64::NAN, |r| r.per_state[n].minus),
            Column::StateNet(n) => transport.as_ref().map_or(f64::NAN, |r| r.per_state[n].net),
            Column::Concurrence => correlations.as_ref().map_or(f64::NAN, |c| c.concurrence),
            Column::Discord => correlations.as_ref().map_or(f64::NAN, |c| c.discord),
            Column::MutualInformation => correlations.as_ref().map_or(f64::NAN, |c| c.mutual_information),
            Column::ClassicalCorrelation => correlations.as_ref().map_or(f64::NAN, |c| c.classical_correlation),
        })
        .collect())
}

/// All grid points in deterministic order, evaluated in parallel on the
/// current rayon pool.
pub fn run_sweep(cfg: &RunConfig) -> Vec<ResultRow> {
    let columns = selected_columns(cfg);
    grid(cfg)
        .into_par_iter()
        .map(|inputs| {
            let outcome = resolve(cfg, &inputs).and_then(|p| evaluate(&p, &columns));
            match outcome {
                Ok(values) => ResultRow { inputs, values, status: Status::Ok },
                Err(e) => ResultRow { inputs, values: vec![f64::NAN; columns.len()], status: Status::from_error(&e) },
            }
        })
        .collect()
}

/// Shortest round-trip decimal; exponent form for very small or large magnitudes.
pub fn format_number(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn header(vars: &[Var], columns: &[Column]) -> String {
    let mut names: Vec<String> = vars.iter().map(|v| format!("{}[{}]", v.name(), v.unit())).collect();
    names.extend(columns.iter().map(|c| format!("{}[{}]", c.name(), c.unit())));
    names.push("status".into());
    names.join(",")
}

pub fn render_csv(cfg: &RunConfig, rows: &[ResultRow]) -> String {
    let vars = cfg.varying();
    let mut out = header(&vars, &selected_columns(cfg));
    out.push('\n');
    for row in rows {
        for (_, x) in &row.inputs {
            out.push_str(&format_number(*x));
            out.push(',');
        }
        for x in &row.values {
            out.push_str(&format_number(*x));
            out.push(',');
        }
        let _ = writeln!(out, "{}", row.status.as_str());
    }
    out
}

pub fn write_csv<W: io::Write>(cfg: &RunConfig, rows: &[ResultRow], mut w: W) -> io::Result<()> {
    w.write_all(render_csv(cfg, rows).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    const BASE: &str = "J = 1\nchi = 0.3\nB = 4\nb = 2\nTM = 1\ndT = 0.4\nGamma_L = 1\nGamma_R = 0.25\n";

    #[test]
    fn column_names_round_trip() {
        for c in Column::all() {
            assert_eq!(c.name().parse::<Column>().unwrap(), c);
        }
    }

    #[test]
    fn number_formatting_round_trips() {
        for x in [0.0, 1.0, -0.25, 0.1 + 0.2, 1e-300, 6.02e23, 1.2345e-7, f64::MIN_POSITIVE] {
            assert_eq!(format_number(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_number(f64::NAN), "NaN");
        assert_eq!(format_number(0.15), "0.15");
        assert_eq!(format_number(1e-9), "1e-9");
    }

    #[test]
    fn grid_order_is_series_then_sweeps() {
        let text = BASE.replace("dT = 0.4\n", "") + "series = dT 0.4 1\nsweep = D 0 1 0.5\n";
        let cfg = parse_config(&text).unwrap();
        let g = grid(&cfg);
        assert_eq!(g.len(), 6);
        assert_eq!(g[0], vec![(Var::DT, 0.4), (Var::D, 0.0)]);
        assert_eq!(g[2], vec![(Var::DT, 0.4), (Var::D, 1.0)]);
        assert_eq!(g[3], vec![(Var::DT, 1.0), (Var::D, 0.0)]);
    }

    #[test]
    fn sweep_rows_and_header() {
        let cfg = parse_config(&format!("{BASE}sweep = D 0 1 0.5\ncolumns = R, J_L, p4\n")).unwrap();
        let rows = run_sweep(&cfg);
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.status == Status::Ok && r.values.iter().all(|v| v.is_finite())));
        let csv = render_csv(&cfg, &rows);
        assert_eq!(csv.lines().next().unwrap(), "D[1],R[1],J_L[J^2],p4[1],status");
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.lines().nth(1).unwrap().starts_with("0,"));
    }

    #[test]
    fn zero_bias_leaves_transport_undefined() {
        let text = BASE.replace("dT = 0.4\n", "D = 1\n") + "sweep = dT 0 0 1\ncolumns = J_L, R\n";
        let cfg = parse_config(&text).unwrap();
        let rows = run_sweep(&cfg);
        assert_eq!(rows[0].status, Status::Ok);
        assert!(rows[0].values[0].abs() < 1e-12);
        assert!(rows[0].values[1].is_nan());
    }

    #[test]
    fn disconnected_point_is_flagged() {
        let text = "J = 1\nchi = 0.3\nD = 0\nb = B\nTM = 1\ndT = 1\nGamma_L = 1\nGamma_R = 0.25\nsweep = B 0 0.5 0.5\ncolumns = R\n";
        let rows = run_sweep(&parse_config(text).unwrap());
        assert_eq!(rows[0].status, Status::Ambiguous);
        assert!(rows[0].values[0].is_nan());
        assert_eq!(rows[1].status, Status::Ok);
    }

    #[test]
    fn linked_splitting_resolves() {
        let text = "J = 1\nchi = 0.3\nD = 0\nb = B\nTM = 1\ndT = 1\nGamma_L = 1\nGamma_R = 0.25\nsweep = B 1 1 1\n";
        let cfg = parse_config(text).unwrap();
        let p = resolve(&cfg, &grid(&cfg)[0]).unwrap();
        assert_eq!(p.params.field, 1.0);
        assert_eq!(p.params.splitting, 1.0);
        assert_eq!(p.baths.t_left, 1.5);
        assert_eq!(p.baths.t_right, 0.5);
    }
}
