//! Figure datasets built from the shipped preset files.

use std::fmt;
use std::str::FromStr;

use crate::config::{parse_config, RunConfig, Series, Var};
use crate::sweep::Column;

pub const FIG2: &str = include_str!("../../../presets/fig2.cfg");
pub const FIG3: &str = include_str!("../../../presets/fig3.cfg");
pub const FIG4: &str = include_str!("../../../presets/fig4.cfg");
pub const FIG5: &str = include_str!("../../../presets/fig5.cfg");
pub const FIG6: &str = include_str!("../../../presets/fig6.cfg");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    Fig2a,
    Fig2b,
    Fig2c,
    Fig2d,
    Fig3a,
    Fig3b,
    Fig4,
    Fig5,
    Fig6,
}

impl FigureId {
    pub const ALL: [FigureId; 9] = [
        FigureId::Fig2a,
        FigureId::Fig2b,
        FigureId::Fig2c,
        FigureId::Fig2d,
        FigureId::Fig3a,
        FigureId::Fig3b,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig2a => "fig2a",
            FigureId::Fig2b => "fig2b",
            FigureId::Fig2c => "fig2c",
            FigureId::Fig2d => "fig2d",
            FigureId::Fig3a => "fig3a",
            FigureId::Fig3b => "fig3b",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
        }
    }

    fn preset(self) -> &'static str {
        match self {
            FigureId::Fig2a | FigureId::Fig2b | FigureId::Fig2c | FigureId::Fig2d => FIG2,
            FigureId::Fig3a | FigureId::Fig3b => FIG3,
            FigureId::Fig4 => FIG4,
            FigureId::Fig5 => FIG5,
            FigureId::Fig6 => FIG6,
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown figure id `{0}` (expected one of fig2a, fig2b, fig2c, fig2d, fig3a, fig3b, fig4, fig5, fig6)")]
pub struct UnknownFigure(pub String);

impl FromStr for FigureId {
    type Err = UnknownFigure;
    fn from_str(s: &str) -> Result<Self, UnknownFigure> {
        FigureId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| UnknownFigure(s.to_string()))
    }
}

fn per_state(f: fn(usize) -> Column) -> Vec<Column> {
    (0..4).map(f).collect()
}

/// Run configuration for a figure; panels sharing a preset differ only in
/// the bias series and the emitted columns.
pub fn figure_config(id: FigureId) -> RunConfig {
    let mut cfg = parse_config(id.preset()).expect("shipped presets parse");
    let hot_left = || Some(Series { var: Var::DT, values: vec![0.4] });
    match id {
        FigureId::Fig2b => {
            cfg.series = Some(Series { var: Var::DT, values: vec![0.4, -0.4] });
            cfg.columns = Some(per_state(Column::Population));
        }
        FigureId::Fig2c => {
            cfg.series = hot_left();
            let mut cols = per_state(Column::StatePlus);
            cols.extend(per_state(Column::StateMinus));
            cfg.columns = Some(cols);
        }
        FigureId::Fig2d => {
            cfg.series = hot_left();
            cfg.columns = Some(per_state(Column::StateNet));
        }
        FigureId::Fig3b => cfg.dm = Some(4.0),
        _ => {}
    }
    cfg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Splitting, Temperatures};

    #[test]
    fn ids_round_trip() {
        for id in FigureId::ALL {
            assert_eq!(id.name().parse::<FigureId>().unwrap(), id);
        }
        assert!("fig7".parse::<FigureId>().is_err());
    }

    #[test]
    fn every_figure_has_a_config() {
        for id in FigureId::ALL {
            let cfg = figure_config(id);
            assert!(!cfg.is_single_point(), "{id}");
            assert_eq!((cfg.exchange, cfg.gamma_left, cfg.gamma_right), (1.0, 1.0, 0.25), "{id}");
        }
    }

    #[test]
    fn fig2_panels() {
        let a = figure_config(FigureId::Fig2a);
        assert_eq!((a.anisotropy, a.field, a.splitting), (Some(0.3), Some(4.0), Splitting::Fixed(2.0)));
        assert_eq!(a.temperatures, Temperatures::Bias { mean: Some(1.0), delta: None });
        assert_eq!(a.series.as_ref().unwrap().values, vec![0.4, 1.0, 1.6]);
        let b = figure_config(FigureId::Fig2b);
        assert_eq!(b.series.unwrap().values, vec![0.4, -0.4]);
        let d = figure_config(FigureId::Fig2d);
        assert_eq!(d.columns.unwrap(), per_state(Column::StateNet));
    }

    #[test]
    fn fig3_panels() {
        let a = figure_config(FigureId::Fig3a);
        assert_eq!(a.splitting, Splitting::Linked);
        assert_eq!(a.dm, Some(0.0));
        assert_eq!(a.series.unwrap().values, vec![0.9, 0.3, 0.0, -0.3]);
        assert_eq!(figure_config(FigureId::Fig3b).dm, Some(4.0));
    }

    #[test]
    fn grid_figures() {
        for id in [FigureId::Fig5, FigureId::Fig6] {
            let cfg = figure_config(id);
            assert_eq!(cfg.temperatures, Temperatures::Explicit { left: Some(0.5), right: None });
            assert_eq!((cfg.anisotropy, cfg.field, cfg.splitting), (Some(0.9), Some(0.2), Splitting::Fixed(0.0)));
            assert_eq!(cfg.varying(), vec![Var::TR, Var::D]);
        }
        assert_eq!(figure_config(FigureId::Fig6).columns.unwrap(), per_state(Column::Population));
    }
}
