//! Neighborhood construction: pick the DTW-nearest series to the one being
//! explained, then densify with bootstrap replicates of each neighbor.

pub mod bootstrap;
pub mod dtw;

use rayon::prelude::*;

use crate::data::{DailySeries, SeriesPanel};
use crate::error::{Error, Result};
use crate::num::Float;
use crate::rng::seed_for_meter;

pub use bootstrap::bootstrap_series;
pub use dtw::{dtw_distance, DtwConfig};

/// Where a neighborhood member came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    /// A real series from the panel.
    Original,
    /// A bootstrap replicate of a real series.
    Bootstrap { parent: String, replicate: usize },
}

impl Provenance {
    /// The real meter this member descends from.
    pub fn parent_id<'a>(&'a self, own_id: &'a str) -> &'a str {
        match self {
            Provenance::Original => own_id,
            Provenance::Bootstrap { parent, .. } => parent,
        }
    }
}

/// One series in a neighborhood, with its origin and the DTW distance of the
/// real series it descends from.
#[derive(Debug, Clone)]
pub struct Member<F> {
    pub series: DailySeries<F>,
    pub provenance: Provenance,
    pub parent_distance: F,
}

/// The n_filt nearest real series to the origin plus their bootstrap
/// replicates. Contains n_filt Original members and n_filt × n_synthetic
/// Bootstrap members, in deterministic order (parents by ascending distance,
/// each followed by its replicates).
#[derive(Debug, Clone)]
pub struct Neighborhood<F> {
    pub origin_meter_id: String,
    pub n_filt: usize,
    pub n_synthetic: usize,
    pub members: Vec<Member<F>>,
}

impl<F: Float> Neighborhood<F> {
    /// Debug dump of every member's (normalized) daily values, one row per
    /// member-day: `meter_id,provenance,replicate,day_index,value`.
    pub fn to_debug_csv(&self) -> String {
        let mut out = String::from("meter_id,provenance,replicate,day_index,value\n");
        for member in &self.members {
            let (label, replicate) = match &member.provenance {
                Provenance::Original => ("original", String::new()),
                Provenance::Bootstrap { replicate, .. } => ("bootstrap", replicate.to_string()),
            };
            let parent = member.provenance.parent_id(&member.series.meter_id);
            for (day, value) in member.series.values.iter().enumerate() {
                out.push_str(&format!(
                    "{parent},{label},{replicate},{day},{}\n",
                    value.as_f64()
                ));
            }
        }
        out
    }
}

/// The `n_filt` meters closest to `origin` by DTW distance, with the origin
/// itself excluded. Ties break by ascending meter id, so the result does not
/// depend on panel iteration order.
pub fn select_nearest<F: Float>(
    panel: &SeriesPanel<F>,
    origin: &str,
    n_filt: usize,
    cfg: &DtwConfig,
) -> Result<Vec<(String, F)>> {
    let origin_entry = panel.require(origin)?;
    if n_filt == 0 {
        return Err(Error::invalid("n_filt must be at least 1"));
    }
    let available = panel.len().saturating_sub(1);
    if n_filt > available {
        return Err(Error::invalid(format!(
            "n_filt {n_filt} exceeds the {available} other meters in the panel"
        )));
    }
    let candidates: Vec<&str> = panel.meter_ids().filter(|id| *id != origin).collect();
    let mut distances = candidates
        .into_par_iter()
        .map(|id| {
            let entry = panel.get(id).expect("id from panel iteration");
            dtw_distance(&origin_entry.consumption, &entry.consumption, cfg)
                .map(|d| (id.to_string(), d))
        })
        .collect::<Result<Vec<_>>>()?;
    distances.sort_by(|a, b| {
        a.1.partial_cmp(&b.1)
            .expect("non-finite DTW distance")
            .then_with(|| a.0.cmp(&b.0))
    });
    distances.truncate(n_filt);
    Ok(distances)
}

/// Select neighbors and generate bootstrap replicates for each, seeding each
/// parent's randomness from (global_seed, parent id) so results are
/// independent of scheduling.
pub fn build_neighborhood<F: Float>(
    panel: &SeriesPanel<F>,
    origin: &str,
    n_filt: usize,
    n_synthetic: usize,
    global_seed: u64,
    cfg: &DtwConfig,
) -> Result<Neighborhood<F>> {
    let selected = select_nearest(panel, origin, n_filt, cfg)?;
    let per_parent: Vec<Vec<Member<F>>> = selected
        .par_iter()
        .map(|(parent_id, distance)| -> Result<Vec<Member<F>>> {
            let parent = &panel.require(parent_id)?.consumption;
            let mut members = Vec::with_capacity(n_synthetic + 1);
            members.push(Member {
                series: parent.clone(),
                provenance: Provenance::Original,
                parent_distance: *distance,
            });
            let seed = seed_for_meter(global_seed, parent_id);
            let replicates = bootstrap::bootstrap_series(parent, n_synthetic, seed)?;
            for (r, series) in replicates.into_iter().enumerate() {
                members.push(Member {
                    series,
                    provenance: Provenance::Bootstrap {
                        parent: parent_id.clone(),
                        replicate: r,
                    },
                    parent_distance: *distance,
                });
            }
            Ok(members)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Neighborhood {
        origin_meter_id: origin.to_string(),
        n_filt,
        n_synthetic,
        members: per_parent.into_iter().flatten().collect(),
    })
}
