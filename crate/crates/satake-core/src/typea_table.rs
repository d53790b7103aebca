//! The built-in classification table for generalized Satake diagrams of
//! finite type A, with its special low-rank rows, and the cross-validation
//! against exhaustive enumeration.

use serde::{Deserialize, Serialize};

use crate::cartan::SimpleTypeName;
use crate::catalogue::cartan_by_name;
use crate::decoration::{
    canonical_representative, enumerate, orbit_classes, special_orbits, Decoration,
    DecorationFilter,
};
use crate::error::Result;
use crate::restricted::{restricted_system, RestrictedTypeLabel};

/// One row of the type-A table. Node sets use 1-based labels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TypeARow {
    /// Descriptive family label, e.g. `(A4)^rfl_3`.
    pub label: String,
    /// Roman-numeral name where one exists (AI..AIV).
    pub roman: Option<String>,
    pub x_labels: Vec<usize>,
    /// tau as a list of transposed label pairs.
    pub tau_pairs: Vec<(usize, usize)>,
    pub restricted: RestrictedTypeLabel,
    pub constraints: String,
    pub odd_nodes: Vec<usize>,
    pub special_orbits: Vec<usize>,
}

fn reflection(n: usize) -> Vec<usize> {
    (0..n).map(|i| n - 1 - i).collect()
}

fn reduced_finite(family: char, rank: usize) -> RestrictedTypeLabel {
    RestrictedTypeLabel::Reduced(crate::cartan::LieTypeLabel::simple(SimpleTypeName::finite(
        family, rank,
    )))
}

/// Emits the rows of the type-A table for rank `n`: the plain and alternating
/// families, the reflection family indexed by the size parameter p, and the
/// special cases (p < 2, p = N, and n = 1).
pub fn table_type_a(n: usize) -> Result<Vec<TypeARow>> {
    assert!(n >= 1);
    let cm = cartan_by_name(&format!("A{n}"))?;
    let cap = n + 1; // N = n + 1
    let mut rows = Vec::new();
    let finish = |label: String,
                  roman: Option<String>,
                  x: Vec<usize>,
                  tau: Vec<usize>,
                  restricted: RestrictedTypeLabel,
                  constraints: String|
     -> Result<TypeARow> {
        let dec = Decoration::new(cm.clone(), x, tau);
        let rep = special_orbits(&dec, None)?;
        let mut tau_pairs: Vec<(usize, usize)> = (0..n)
            .filter(|&i| dec.tau[i] > i)
            .map(|i| (i + 1, dec.tau[i] + 1))
            .collect();
        tau_pairs.sort_unstable();
        Ok(TypeARow {
            label,
            roman,
            x_labels: dec.x.iter().map(|&i| i + 1).collect(),
            tau_pairs,
            restricted,
            constraints,
            odd_nodes: rep.odd_nodes.iter().map(|&i| i + 1).collect(),
            special_orbits: rep
                .i_diff
                .iter()
                .chain(&rep.i_nsf)
                .map(|&i| i + 1)
                .collect(),
        })
    };
    if n > 1 {
        rows.push(finish(
            format!("(A{n})^pl"),
            Some("AI".into()),
            Vec::new(),
            (0..n).collect(),
            reduced_finite('A', n),
            "n > 1".into(),
        )?);
    }
    if n > 1 && n % 2 == 1 {
        let x: Vec<usize> = (0..n).step_by(2).collect();
        rows.push(finish(
            format!("(A{n})^alt"),
            Some("AII".into()),
            x,
            (0..n).collect(),
            reduced_finite('A', (n - 1) / 2),
            "n odd, n > 1".into(),
        )?);
    }
    // reflecting family: X of type A_{p-1} centred, p = N mod 2, ..., N
    let mut p = cap % 2;
    while p <= cap {
        let (x, restricted, constraints): (Vec<usize>, RestrictedTypeLabel, String) = if p <= 1 {
            let r = if cap % 2 == 0 {
                reduced_finite('C', cap / 2)
            } else {
                RestrictedTypeLabel::BC((cap - 1) / 2)
            };
            (Vec::new(), r, format!("p = {p} < 2"))
        } else {
            let start = (n - (p - 1)) / 2;
            let x: Vec<usize> = (start..start + p - 1).collect();
            let r = if p == cap {
                RestrictedTypeLabel::Z0
            } else {
                RestrictedTypeLabel::BC((cap - p) / 2)
            };
            (x, r, format!("0 <= p <= N, N - p even, p = {p}"))
        };
        let orbits_outside = (n - x.len()).div_ceil(2);
        let roman = if n == 1 {
            None
        } else if p == cap {
            None
        } else if orbits_outside == 1 {
            Some("AIV".into())
        } else {
            Some("AIII".into())
        };
        rows.push(finish(
            format!("(A{n})^rfl_{p}"),
            roman,
            x,
            reflection(n),
            restricted,
            constraints,
        )?);
        p += 2;
    }
    Ok(rows)
}

/// Result of diffing the table against exhaustive enumeration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TypeADiff {
    pub n: usize,
    pub table_rows: usize,
    pub enumerated_orbits: usize,
    pub missing_from_table: Vec<String>,
    pub missing_from_enumeration: Vec<String>,
    pub restricted_mismatches: Vec<String>,
}

impl TypeADiff {
    pub fn clean(&self) -> bool {
        self.table_rows == self.enumerated_orbits
            && self.missing_from_table.is_empty()
            && self.missing_from_enumeration.is_empty()
            && self.restricted_mismatches.is_empty()
    }
}

/// Enumerates the Aut(A)-orbits of generalized Satake diagrams of A_n and
/// matches them one-to-one against the table rows, comparing restricted
/// types computed from scratch.
pub fn validate_type_a(n: usize) -> Result<TypeADiff> {
    let cm = cartan_by_name(&format!("A{n}"))?;
    let gsat = enumerate(&cm, DecorationFilter::GeneralizedSatake, 12)?;
    let orbits = orbit_classes(&gsat);
    let rows = table_type_a(n)?;
    let mut diff = TypeADiff {
        n,
        table_rows: rows.len(),
        enumerated_orbits: orbits.len(),
        missing_from_table: Vec::new(),
        missing_from_enumeration: Vec::new(),
        restricted_mismatches: Vec::new(),
    };
    let key = |d: &Decoration| (d.x.clone(), d.tau.clone());
    let mut row_reps = Vec::new();
    for row in &rows {
        let x: Vec<usize> = row.x_labels.iter().map(|&l| l - 1).collect();
        let mut tau: Vec<usize> = (0..n).collect();
        for &(a, b) in &row.tau_pairs {
            tau[a - 1] = b - 1;
            tau[b - 1] = a - 1;
        }
        let dec = Decoration::new(cm.clone(), x, tau);
        let rep = canonical_representative(&dec);
        row_reps.push((key(&rep), row));
        // restricted type recomputed from the decoration must match the row
        let rs = restricted_system(&dec, 8)?;
        if rs.type_label != row.restricted {
            diff.restricted_mismatches.push(format!(
                "{}: table says {}, computed {}",
                row.label, row.restricted, rs.type_label
            ));
        }
    }
    let orbit_keys: Vec<(Vec<usize>, Vec<usize>)> = orbits.iter().map(key).collect();
    for (k, row) in &row_reps {
        if !orbit_keys.contains(k) {
            diff.missing_from_enumeration.push(row.label.clone());
        }
    }
    for (orbit, k) in orbits.iter().zip(&orbit_keys) {
        if !row_reps.iter().any(|(rk, _)| rk == k) {
            diff.missing_from_table.push(format!("X={:?} tau={:?}", orbit.x, orbit.tau));
        }
    }
    Ok(diff)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n1_special_cases() {
        let rows = table_type_a(1).unwrap();
        assert_eq!(rows.len(), 2);
        // p=0: restricted A1 (C1 canonicalizes to A1), the node is special
        assert_eq!(rows[0].restricted, reduced_finite('A', 1));
        assert_eq!(rows[0].special_orbits, vec![1]);
        // p=2: compact row, restricted Z0
        assert_eq!(rows[1].restricted, RestrictedTypeLabel::Z0);
    }

    #[test]
    fn row_counts_low_rank() {
        // A2: pl, rfl_1, rfl_3
        assert_eq!(table_type_a(2).unwrap().len(), 3);
        // A3: pl, alt, rfl_0, rfl_2, rfl_4
        assert_eq!(table_type_a(3).unwrap().len(), 5);
        // A4: pl, rfl_1, rfl_3, rfl_5
        assert_eq!(table_type_a(4).unwrap().len(), 4);
        // A5: pl, alt, rfl_0, rfl_2, rfl_4, rfl_6
        assert_eq!(table_type_a(5).unwrap().len(), 6);
    }

    #[test]
    fn validation_clean_for_small_ranks() {
        for n in 1..=4 {
            let diff = validate_type_a(n).unwrap();
            assert!(diff.clean(), "A{n}: {diff:?}");
        }
    }

    #[test]
    fn aiii_marks_and_bc_types() {
        let rows = table_type_a(3).unwrap();
        let rfl2 = rows.iter().find(|r| r.label == "(A3)^rfl_2").unwrap();
        assert_eq!(rfl2.restricted, RestrictedTypeLabel::BC(1));
        assert_eq!(rfl2.x_labels, vec![2]);
        assert_eq!(rfl2.tau_pairs, vec![(1, 3)]);
        // the outer orbit is special (I_diff)
        assert_eq!(rfl2.special_orbits, vec![1]);
        let rfl0 = rows.iter().find(|r| r.label == "(A3)^rfl_0").unwrap();
        assert_eq!(rfl0.restricted, reduced_finite('C', 2));
    }
}
