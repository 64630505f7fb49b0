//! Invariant suite for census files.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use hypercensus::census::VContext;
use hypercensus::f2space::{cmp_packed_shortlex, pack_poly};
use hypercensus::gf2n::{check_gcd_condition, MAX_DEGREE};
use hypercensus::moebius::monic_orbit_reps;
use hypercensus::obstruct::{generate_obstructions, Mode};
use hypercensus::weil::{is_weil_poly, two_rank, ResiduePattern, WeilPoly};
use hypercensus::zeta::{count_points_and_weierstrass, geometric_weierstrass, weil_from_counts};
use hypercensus::{is_hyperelliptic, CurveRecord, CurveRow};
use rayon::prelude::*;

/// Checks in report order.
pub const CHECKS: [&str; 12] = [
    "parse",
    "field",
    "smooth",
    "v-representative",
    "u-canonical",
    "order",
    "stored-counts",
    "parity",
    "congruence",
    "weil",
    "two-rank",
    "unobstructed",
];

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckTally {
    pub failures: usize,
    pub first: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub rows: usize,
    pub tallies: BTreeMap<&'static str, CheckTally>,
    /// Rows carrying a conjectured-but-unproved obstruction (`110`, `1100`).
    pub conjectured: usize,
    /// Extension degree actually used per `(genus, n)`.
    pub extents: BTreeMap<(u32, u32), u32>,
    /// Rows per residue pattern.
    pub patterns: BTreeMap<String, usize>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.tallies.values().all(|t| t.failures == 0)
    }

    fn fail(&mut self, check: &'static str, msg: String) {
        let t = self.tallies.entry(check).or_default();
        t.failures += 1;
        t.first.get_or_insert(msg);
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rows {}", self.rows)?;
        for ((g, n), k) in &self.extents {
            writeln!(f, "extent genus={g} n={n} k<={k}")?;
        }
        for name in CHECKS {
            let t = &self.tallies[name];
            match &t.first {
                None => writeln!(f, "ok   {name}")?,
                Some(m) => writeln!(f, "FAIL {name} ({} rows) first: {m}", t.failures)?,
            }
        }
        for (p, c) in &self.patterns {
            writeln!(f, "pattern {p} {c}")?;
        }
        write!(f, "conjectured-obstruction rows {}", self.conjectured)
    }
}

fn is_conjectured(p: &ResiduePattern) -> bool {
    matches!(p.bits(), [1, 1, 0] | [1, 1, 0, 0])
}

fn two_adic(k: u32) -> u32 {
    k.trailing_zeros()
}

/// Per-record checks that need only the record itself.
fn check_record(
    rec: &CurveRecord,
    kmax: u32,
    obstructions: &HashSet<ResiduePattern>,
    out: &mut Vec<(&'static str, String)>,
) -> Option<ResiduePattern> {
    let g = rec.genus;
    let q = rec.field.q();
    let tag = format!("v={} u={}", rec.v, rec.u);
    if !is_hyperelliptic(&rec.v, &rec.u, g) {
        out.push(("smooth", tag));
        return None;
    }
    let mut counts = Vec::with_capacity(kmax as usize);
    for k in 1..=kmax {
        match count_points_and_weierstrass(rec, k) {
            Ok((nk, wk)) => {
                if (nk ^ wk) & 1 != 0 {
                    out.push(("parity", format!("{tag}: N_{k}={nk} W_{k}={wk}")));
                }
                if k == 2 || k == 4 {
                    let m = 1u64 << (two_adic(k) + 1);
                    if (nk + wk) % m != 2 % m {
                        out.push((
                            "congruence",
                            format!("{tag}: N_{k}={nk} W_{k}={wk} mod {m}"),
                        ));
                    }
                }
                counts.push(nk);
            }
            Err(e) => {
                out.push(("stored-counts", format!("{tag}: {e}")));
                return None;
            }
        }
    }
    if let Some(stored) = &rec.counts {
        let m = stored.len().min(counts.len());
        if stored[..m] != counts[..m] {
            out.push((
                "stored-counts",
                format!("{tag}: stored {stored:?}, computed {counts:?}"),
            ));
        }
    }
    let a = match weil_from_counts(q, g, &counts) {
        Ok(a) => a,
        Err(e) => {
            out.push(("weil", format!("{tag}: {e}")));
            return None;
        }
    };
    let Some(a) = a
        .iter()
        .map(|x| i64::try_from(x).ok())
        .collect::<Option<Vec<i64>>>()
    else {
        out.push(("weil", format!("{tag}: coefficient overflow")));
        return None;
    };
    let w = WeilPoly::new(q, a.clone());
    if !is_weil_poly(&w) {
        out.push(("weil", format!("{tag}: {a:?} is not a Weil polynomial")));
    }
    if rec.weil.as_ref().is_some_and(|s| *s != a) {
        out.push((
            "weil",
            format!(
                "{tag}: stored {:?}, computed {a:?}",
                rec.weil.as_ref().unwrap()
            ),
        ));
    }
    let r = two_rank(&a);
    let geometric = geometric_weierstrass(rec);
    if geometric != r as u64 + 1 || rec.two_rank.is_some_and(|s| s != r) {
        out.push((
            "two-rank",
            format!(
                "{tag}: 2-rank {r}, stored {:?}, geometric #W {geometric}",
                rec.two_rank
            ),
        ));
    }
    let p = w.pattern();
    if obstructions.contains(&p) {
        out.push(("unobstructed", format!("{tag}: pattern {p} is obstructed")));
    }
    Some(p)
}

/// Runs every check on `rows`. `max_ext` defaults to `2g`; it is capped so
/// that `n k` stays within the supported field degrees, and raised to `g`
/// where possible so the Weil polynomial is determined.
pub fn verify_rows(rows: &[CurveRow], max_ext: Option<u32>) -> VerifyReport {
    let mut report = VerifyReport {
        rows: rows.len(),
        tallies: CHECKS.iter().map(|&c| (c, CheckTally::default())).collect(),
        conjectured: 0,
        extents: BTreeMap::new(),
        patterns: BTreeMap::new(),
    };
    let mut records: Vec<CurveRecord> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        match row.to_record() {
            Ok(rec) => match check_gcd_condition(rec.genus, &rec.field) {
                Ok(()) => records.push(rec),
                Err(e) => report.fail(
                    "field",
                    format!(
                        "row {}: genus {} over F_{}: {e}",
                        i + 1,
                        rec.genus,
                        rec.field.q()
                    ),
                ),
            },
            Err(e) => report.fail("parse", format!("row {}: {e}", i + 1)),
        }
    }

    for pair in records.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let same_group = a.genus == b.genus && a.field == b.field;
        if same_group && !a.cmp_models(b).is_lt() {
            report.fail(
                "order",
                format!("v={} u={} not before v={} u={}", a.v, a.u, b.v, b.u),
            );
        }
    }

    // Orbit representatives and obstruction lists, once per group.
    let mut reps: HashMap<(u32, u32), Result<HashSet<u128>, String>> = HashMap::new();
    let mut obstructions: HashMap<u32, HashSet<ResiduePattern>> = HashMap::new();
    for rec in &records {
        let n = rec.field.n();
        reps.entry((rec.genus, rec.field.modulus()))
            .or_insert_with(|| {
                monic_orbit_reps(rec.genus, &rec.field)
                    .map(|vs| vs.iter().map(|v| pack_poly(v, n)).collect())
                    .map_err(|e| e.to_string())
            });
        obstructions.entry(rec.genus).or_insert_with(|| {
            generate_obstructions(rec.genus, 2 * rec.genus, Mode::HigherPower)
                .into_iter()
                .collect()
        });
        let cap = MAX_DEGREE / n;
        let k = max_ext
            .unwrap_or(2 * rec.genus)
            .max(rec.genus)
            .min(cap)
            .max(1);
        report.extents.insert((rec.genus, n), k);
    }

    // Group by (genus, field, v) so each stabilizer context is built once.
    let mut groups: BTreeMap<(u32, u32, u128), Vec<usize>> = BTreeMap::new();
    for (i, rec) in records.iter().enumerate() {
        let key = (
            rec.genus,
            rec.field.modulus(),
            pack_poly(&rec.v, rec.field.n()),
        );
        groups.entry(key).or_default().push(i);
    }
    let groups: Vec<Vec<usize>> = groups.into_values().collect();
    let results: Vec<Vec<(&'static str, String, Option<ResiduePattern>)>> = groups
        .par_iter()
        .map(|idx| {
            let mut out: Vec<(&'static str, String, Option<ResiduePattern>)> = Vec::new();
            let first = &records[idx[0]];
            let n = first.field.n();
            match &reps[&(first.genus, first.field.modulus())] {
                Ok(set) if set.contains(&pack_poly(&first.v, n)) => {}
                Ok(_) => out.push((
                    "v-representative",
                    format!("v={} is not an orbit representative", first.v),
                    None,
                )),
                Err(e) => out.push(("v-representative", format!("v={}: {e}", first.v), None)),
            }
            let ctx = VContext::new(&first.v, first.genus, &first.field);
            for &i in idx {
                let rec = &records[i];
                match &ctx {
                    Ok(ctx) => {
                        let w = pack_poly(&rec.u, n);
                        let canonical = ctx.space().reduce(w) == w
                            && ctx
                                .orbit(w)
                                .iter()
                                .all(|&x| !cmp_packed_shortlex(x, w, n).is_lt());
                        if !canonical {
                            out.push((
                                "u-canonical",
                                format!("v={} u={} is not the canonical model", rec.v, rec.u),
                                None,
                            ));
                        }
                    }
                    Err(e) => out.push(("u-canonical", format!("v={}: {e}", rec.v), None)),
                }
                let k = report.extents[&(rec.genus, n)];
                let mut local = Vec::new();
                let p = check_record(rec, k, &obstructions[&rec.genus], &mut local);
                out.extend(local.into_iter().map(|(c, m)| (c, m, None)));
                out.push(("", String::new(), p));
            }
            out
        })
        .collect();
    for (check, msg, pattern) in results.into_iter().flatten() {
        if let Some(p) = pattern {
            if is_conjectured(&p) {
                report.conjectured += 1;
            }
            *report.patterns.entry(p.to_string()).or_default() += 1;
        } else if !check.is_empty() {
            report.fail(check, msg);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use hypercensus::zeta::annotate;
    use hypercensus::{enumerate_genus, Field};

    fn census_rows(genus: u32, n: u32) -> Vec<CurveRow> {
        let f = Field::conway(n).unwrap();
        let mut recs = enumerate_genus(genus, &f).unwrap();
        for r in &mut recs {
            annotate(r, genus).unwrap();
        }
        recs.iter().map(CurveRecord::to_row).collect()
    }

    #[test]
    fn genuine_census_passes() {
        let rows = census_rows(2, 1);
        let rep = verify_rows(&rows, None);
        assert!(rep.passed(), "{rep}");
        assert_eq!(rep.extents[&(2, 1)], 4);
        assert_eq!(rep.conjectured, 0);
    }

    #[test]
    fn tampering_is_caught() {
        let rows = census_rows(2, 1);
        let mut bad = rows.clone();
        bad.swap(0, 1);
        assert!(verify_rows(&bad, None).tallies["order"].failures > 0);

        let mut bad = rows.clone();
        bad[0].counts.as_mut().unwrap()[0] += 2;
        assert_eq!(verify_rows(&bad, None).tallies["stored-counts"].failures, 1);

        let mut bad = rows.clone();
        bad[0].two_rank = Some(bad[0].two_rank.unwrap() ^ 1);
        assert_eq!(verify_rows(&bad, None).tallies["two-rank"].failures, 1);

        let mut bad = rows.clone();
        bad[0].u = vec![0, 0, 0, 0, 0, 0, 0];
        assert_eq!(verify_rows(&bad, None).tallies["smooth"].failures, 1);

        let mut bad = rows;
        bad[0].field_poly = 5;
        assert_eq!(verify_rows(&bad, None).tallies["parse"].failures, 1);
    }

    #[test]
    fn non_canonical_model_is_caught() {
        // x^2 + x + 1 twisted by r = x: same curve, not the stored form.
        let mut rows = census_rows(1, 1);
        let last = rows.len() - 1;
        let row = &mut rows[last];
        let f = Field::conway(1).unwrap();
        let rec = row.to_record().unwrap();
        let r = hypercensus::Poly::parse(&f, "0,1").unwrap();
        let u = &(&rec.u + &r.square()) + &(&rec.v * &r);
        row.u = u.coeffs().iter().map(|c| c.bits()).collect();
        let rep = verify_rows(&rows, None);
        assert_eq!(rep.tallies["u-canonical"].failures, 1, "{rep}");
        assert_eq!(rep.tallies["stored-counts"].failures, 0);
    }
}
