//! Category taxonomy and journal-level fractional category vectors.
//!
//! A scheme is a two-level taxonomy: areas group categories. One area is the
//! multidisciplinary catch-all, and each area may carry "miscellaneous"
//! categories. Neither is a classification target: the targets are the
//! non-misc categories of the non-multidisciplinary areas.
//!
//! Journal assignments are fractionalized by splitting the journal's weight
//! equally over its codes, then pushing each misc code's share onto the
//! targets of its area and each multidisciplinary code's share onto every
//! target.

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::csvio::{self, CsvInput};
use crate::error::{Error, Result};
use crate::types::{AreaCode, CategoryCode};

pub const SCHEME_HEADER: [&str; 5] = [
    "code",
    "name",
    "area_code",
    "is_misc",
    "is_multidisciplinary-area",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Category {
    pub code: CategoryCode,
    pub name: String,
    pub area: AreaCode,
    pub is_misc: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Area {
    pub code: AreaCode,
    pub name: String,
    pub is_multidisciplinary: bool,
}

/// Immutable, validated category taxonomy.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryScheme {
    categories: Vec<Category>,
    areas: Vec<Area>,
    by_code: HashMap<CategoryCode, usize>,
    targets: Vec<CategoryCode>,
    target_pos: HashMap<CategoryCode, usize>,
    /// Target positions per non-multidisciplinary area.
    area_targets: BTreeMap<AreaCode, Vec<usize>>,
    multidisciplinary: AreaCode,
}

impl CategoryScheme {
    /// Builds a scheme from category rows and the per-area multidisciplinary
    /// flag. Area names are taken from the category whose code equals the
    /// area code, when there is one.
    pub fn from_rows(rows: Vec<(Category, bool)>) -> Result<Self> {
        let mut categories: Vec<Category> = Vec::with_capacity(rows.len());
        let mut area_flags: BTreeMap<AreaCode, bool> = BTreeMap::new();
        let mut by_code = HashMap::with_capacity(rows.len());
        for (cat, multi) in rows {
            if by_code.contains_key(&cat.code) {
                return Err(Error::Scheme(format!("duplicate category code {}", cat.code)));
            }
            match area_flags.get(&cat.area) {
                Some(&prev) if prev != multi => {
                    return Err(Error::Scheme(format!(
                        "area {} has inconsistent multidisciplinary flags (category {})",
                        cat.area, cat.code
                    )));
                }
                _ => {
                    area_flags.insert(cat.area, multi);
                }
            }
            by_code.insert(cat.code, categories.len());
            categories.push(cat);
        }
        categories.sort_by_key(|c| c.code);
        let by_code: HashMap<_, _> = categories
            .iter()
            .enumerate()
            .map(|(i, c)| (c.code, i))
            .collect();

        let multi_areas: Vec<AreaCode> = area_flags
            .iter()
            .filter(|(_, &m)| m)
            .map(|(&a, _)| a)
            .collect();
        let multidisciplinary = match multi_areas.as_slice() {
            [one] => *one,
            [] => return Err(Error::Scheme("no multidisciplinary area".into())),
            many => {
                return Err(Error::Scheme(format!(
                    "{} areas flagged multidisciplinary (first {})",
                    many.len(),
                    many[0]
                )))
            }
        };

        let areas: Vec<Area> = area_flags
            .iter()
            .map(|(&code, &is_multidisciplinary)| {
                let name = by_code
                    .get(&CategoryCode(code.0))
                    .map(|&i| categories[i].name.clone())
                    .unwrap_or_else(|| format!("Area {code}"));
                Area {
                    code,
                    name,
                    is_multidisciplinary,
                }
            })
            .collect();

        let targets: Vec<CategoryCode> = categories
            .iter()
            .filter(|c| !c.is_misc && c.area != multidisciplinary)
            .map(|c| c.code)
            .collect();
        let target_pos: HashMap<_, _> = targets.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut area_targets: BTreeMap<AreaCode, Vec<usize>> = BTreeMap::new();
        for area in areas.iter().filter(|a| !a.is_multidisciplinary) {
            area_targets.insert(area.code, Vec::new());
        }
        for (pos, code) in targets.iter().enumerate() {
            let area = categories[by_code[code]].area;
            area_targets.get_mut(&area).expect("area registered").push(pos);
        }
        if let Some((area, _)) = area_targets.iter().find(|(_, t)| t.is_empty()) {
            return Err(Error::Scheme(format!(
                "area {area} has no non-miscellaneous category"
            )));
        }

        Ok(CategoryScheme {
            categories,
            areas,
            by_code,
            targets,
            target_pos,
            area_targets,
            multidisciplinary,
        })
    }

    /// Loads the scheme CSV (`code,name,area_code,is_misc,is_multidisciplinary-area`).
    pub fn load(path: &Path) -> Result<Self> {
        let mut input = csvio::open(path)?;
        Self::read(&mut input)
    }

    pub fn from_reader<R: Read>(name: &str, reader: R) -> Result<Self> {
        Self::read(&mut CsvInput::new(name, reader))
    }

    fn read<R: Read>(input: &mut CsvInput<R>) -> Result<Self> {
        input.expect_headers(&SCHEME_HEADER)?;
        let file = input.name().to_owned();
        let mut rows = Vec::new();
        input.for_each_row(|line, rec| {
            if rec.len() != SCHEME_HEADER.len() {
                return Err(Error::parse(&file, line, "wrong number of columns"));
            }
            let cat = Category {
                code: csvio::field(&file, line, rec, 0, "code")?,
                name: rec[1].to_owned(),
                area: csvio::field(&file, line, rec, 2, "area_code")?,
                is_misc: csvio::flag(&file, line, rec, 3, "is_misc")?,
            };
            let multi = csvio::flag(&file, line, rec, 4, "is_multidisciplinary-area")?;
            rows.push((cat, multi));
            Ok(())
        })?;
        Self::from_rows(rows)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let to_io = |e: csv::Error| Error::io("scheme.csv", e.into());
        w.write_record(SCHEME_HEADER).map_err(to_io)?;
        for c in &self.categories {
            let multi = c.area == self.multidisciplinary;
            w.write_record([
                c.code.to_string(),
                c.name.clone(),
                c.area.to_string(),
                u8::from(c.is_misc).to_string(),
                u8::from(multi).to_string(),
            ])
            .map_err(to_io)?;
        }
        w.flush().map_err(|e| Error::io("scheme.csv", e))
    }

    pub fn categories(&self) -> &[Category] {
        &self.categories
    }

    pub fn areas(&self) -> &[Area] {
        &self.areas
    }

    pub fn category(&self, code: CategoryCode) -> Option<&Category> {
        self.by_code.get(&code).map(|&i| &self.categories[i])
    }

    pub fn area(&self, code: AreaCode) -> Option<&Area> {
        self.areas
            .binary_search_by_key(&code, |a| a.code)
            .ok()
            .map(|i| &self.areas[i])
    }

    /// Area of a category code.
    pub fn area_of(&self, code: CategoryCode) -> Result<AreaCode> {
        self.category(code)
            .map(|c| c.area)
            .ok_or(Error::UnknownCategory(code))
    }

    pub fn multidisciplinary_area(&self) -> AreaCode {
        self.multidisciplinary
    }

    /// Classification targets in ascending code order.
    pub fn targets(&self) -> &[CategoryCode] {
        &self.targets
    }

    pub fn target_count(&self) -> usize {
        self.targets.len()
    }

    /// Dense position of a target code in [`targets`](Self::targets).
    pub fn target_position(&self, code: CategoryCode) -> Option<usize> {
        self.target_pos.get(&code).copied()
    }

    pub fn is_target(&self, code: CategoryCode) -> bool {
        self.target_pos.contains_key(&code)
    }

    pub fn is_misc(&self, code: CategoryCode) -> bool {
        self.category(code).is_some_and(|c| c.is_misc)
    }

    pub fn is_multidisciplinary(&self, code: CategoryCode) -> bool {
        self.category(code)
            .is_some_and(|c| c.area == self.multidisciplinary)
    }

    /// Non-multidisciplinary areas in ascending code order.
    pub fn subject_areas(&self) -> impl Iterator<Item = &Area> {
        self.areas.iter().filter(|a| !a.is_multidisciplinary)
    }

    /// Target positions that absorb the weight of a misc category of `area`.
    ///
    /// All non-misc categories of the area receive an equal share, including
    /// ones the journal is also assigned to directly.
    fn misc_recipients(&self, area: AreaCode) -> &[usize] {
        &self.area_targets[&area]
    }

    /// Fractional target vector for a journal assigned to `codes` (set
    /// semantics: duplicates and ordering are ignored). Sums to 1.
    pub fn fractionalize_journal(&self, codes: &[CategoryCode]) -> Result<CategoryVector> {
        let mut dense = vec![0.0; self.targets.len()];
        self.fractionalize_into(codes, &mut dense, None)?;
        Ok(CategoryVector::from_dense(&self.targets, &dense))
    }

    /// Like [`fractionalize_journal`](Self::fractionalize_journal) but keeps
    /// multidisciplinary codes as themselves instead of spreading them over
    /// all targets. Keys are therefore not restricted to targets.
    pub fn fractionalize_journal_unsplit(
        &self,
        codes: &[CategoryCode],
    ) -> Result<Vec<(CategoryCode, f64)>> {
        let mut dense = vec![0.0; self.targets.len()];
        let mut kept = BTreeMap::new();
        self.fractionalize_into(codes, &mut dense, Some(&mut kept))?;
        let mut out: BTreeMap<CategoryCode, f64> = kept;
        for (pos, &w) in dense.iter().enumerate() {
            if w > 0.0 {
                out.insert(self.targets[pos], w);
            }
        }
        Ok(out.into_iter().collect())
    }

    fn fractionalize_into(
        &self,
        codes: &[CategoryCode],
        dense: &mut [f64],
        mut keep_multi: Option<&mut BTreeMap<CategoryCode, f64>>,
    ) -> Result<()> {
        let mut codes = codes.to_vec();
        codes.sort_unstable();
        codes.dedup();
        if codes.is_empty() {
            return Err(Error::EmptyAssignment);
        }
        let share = 1.0 / codes.len() as f64;
        for code in codes {
            let cat = self.category(code).ok_or(Error::UnknownCategory(code))?;
            if cat.area == self.multidisciplinary {
                match keep_multi.as_deref_mut() {
                    Some(kept) => *kept.entry(code).or_insert(0.0) += share,
                    None => {
                        let part = share / dense.len() as f64;
                        dense.iter_mut().for_each(|w| *w += part);
                    }
                }
            } else if cat.is_misc {
                let recipients = self.misc_recipients(cat.area);
                let part = share / recipients.len() as f64;
                for &pos in recipients {
                    dense[pos] += part;
                }
            } else {
                dense[self.target_pos[&code]] += share;
            }
        }
        Ok(())
    }
}

/// Sparse map from target category code to a strictly positive weight,
/// stored in ascending code order.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CategoryVector {
    entries: Vec<(CategoryCode, f64)>,
}

impl CategoryVector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a vector from arbitrary pairs; zero weights are dropped and
    /// repeated codes summed.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (CategoryCode, f64)>) -> Self {
        let mut map: BTreeMap<CategoryCode, f64> = BTreeMap::new();
        for (c, w) in pairs {
            *map.entry(c).or_insert(0.0) += w;
        }
        CategoryVector {
            entries: map.into_iter().filter(|&(_, w)| w > 0.0).collect(),
        }
    }

    /// Builds from a dense buffer aligned with `targets`.
    pub fn from_dense(targets: &[CategoryCode], dense: &[f64]) -> Self {
        CategoryVector {
            entries: targets
                .iter()
                .zip(dense)
                .filter(|(_, &w)| w > 0.0)
                .map(|(&c, &w)| (c, w))
                .collect(),
        }
    }

    /// Pairs must be sorted by code, unique and strictly positive.
    pub(crate) fn from_sorted_unchecked(entries: Vec<(CategoryCode, f64)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|&(_, w)| w > 0.0));
        CategoryVector { entries }
    }

    pub fn entries(&self) -> &[(CategoryCode, f64)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (CategoryCode, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, code: CategoryCode) -> f64 {
        self.entries
            .binary_search_by_key(&code, |e| e.0)
            .map_or(0.0, |i| self.entries[i].1)
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    /// Scales to unit sum. Empty vectors stay empty.
    pub fn normalized(&self) -> Self {
        let total = self.sum();
        CategoryVector {
            entries: self.entries.iter().map(|&(c, w)| (c, w / total)).collect(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        CategoryVector::from_pairs(self.entries.iter().map(|&(c, w)| (c, w * factor)))
    }
}
