//! Golden grids shipped as text fixtures and their regeneration.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use multirec_core::algebra::{family_c, SubgroupFamily};
use multirec_core::derive::{
    derivative_per_direction, derivative_uniform, equal_up_to_bijection, DerivativeWord,
    ReturnWord,
};
use multirec_core::generators::{fib_rows_word, presets, toeplitz_rows_word};
use multirec_core::{factor_at, FiniteWord, Letter, Position, Size, WordSource};

use crate::error::{CliError, CliResult};

/// Where the fixtures live when no directory is given.
pub fn default_fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

/// A grid fixture: `dims=WxH alphabet=k` then rows, top row first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridFixture {
    pub width: usize,
    pub height: usize,
    pub alphabet: usize,
    /// Tokens, top row first.
    pub rows: Vec<Vec<String>>,
}

impl GridFixture {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or("empty file")?;
        let mut width = None;
        let mut height = None;
        let mut alphabet = None;
        for field in header.split_whitespace() {
            if let Some(d) = field.strip_prefix("dims=") {
                let (w, h) = d.split_once('x').ok_or("dims must be WxH")?;
                width = Some(w.parse::<usize>().map_err(|e| e.to_string())?);
                height = Some(h.parse::<usize>().map_err(|e| e.to_string())?);
            } else if let Some(k) = field.strip_prefix("alphabet=") {
                alphabet = Some(k.parse::<usize>().map_err(|e| e.to_string())?);
            }
        }
        let (width, height, alphabet) = match (width, height, alphabet) {
            (Some(w), Some(h), Some(k)) => (w, h, k),
            _ => return Err(format!("bad header {header:?}")),
        };
        let rows: Vec<Vec<String>> = lines
            .map(|l| l.split_whitespace().map(str::to_string).collect())
            .collect();
        if rows.len() != height || rows.iter().any(|r| r.len() != width) {
            return Err(format!("grid is not {width}x{height}"));
        }
        Ok(GridFixture {
            width,
            height,
            alphabet,
            rows,
        })
    }

    /// Token at (x, y), y counted from the bottom.
    pub fn at(&self, x: usize, y: usize) -> &str {
        &self.rows[self.height - 1 - y][x]
    }

    /// Numeric cells, "?" as `None`, in row-major order from the bottom row.
    pub fn codes(&self) -> Result<Vec<Option<u32>>, String> {
        let mut out = Vec::with_capacity(self.width * self.height);
        for y in 0..self.height {
            for x in 0..self.width {
                let t = self.at(x, y);
                out.push(if t == "?" {
                    None
                } else {
                    Some(t.parse::<u32>().map_err(|_| format!("bad cell {t:?}"))?)
                });
            }
        }
        Ok(out)
    }

    pub fn to_word(&self) -> Result<FiniteWord, String> {
        let codes = self.codes()?;
        let size = Size::new(vec![self.width as u64, self.height as u64]).map_err(|e| e.to_string())?;
        let mut cells = codes.into_iter();
        let mut bad = false;
        let w = FiniteWord::from_fn(size, |_| match cells.next().flatten() {
            Some(c) => Letter(c),
            None => {
                bad = true;
                Letter(0)
            }
        });
        if bad {
            return Err("undefined cell in a letter grid".into());
        }
        Ok(w)
    }
}

#[derive(Clone, Debug)]
pub struct FigureResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn read(dir: &Path, file: &str) -> CliResult<String> {
    let path = dir.join(file);
    if !path.is_file() {
        return Err(CliError::FixtureMissing(path));
    }
    fs::read_to_string(&path).map_err(|source| CliError::Io { path, source })
}

fn grid(dir: &Path, file: &str) -> CliResult<GridFixture> {
    let text = read(dir, file)?;
    GridFixture::parse(&text).map_err(|reason| CliError::BadFixture {
        path: dir.join(file),
        reason,
    })
}

fn bad(dir: &Path, file: &str, reason: String) -> CliError {
    CliError::BadFixture {
        path: dir.join(file),
        reason,
    }
}

/// Cellwise mismatches between a block and a fixture.
pub fn mismatches(w: &FiniteWord, g: &GridFixture) -> usize {
    let dims = w.size().dims();
    if dims != [g.width as u64, g.height as u64] {
        return usize::MAX;
    }
    let mut n = 0;
    for y in 0..g.height {
        for x in 0..g.width {
            if w.get(&[x as u64, y as u64]).0.to_string() != g.at(x, y) {
                n += 1;
            }
        }
    }
    n
}

fn compare_block(name: &'static str, w: &FiniteWord, g: &GridFixture) -> FigureResult {
    let n = mismatches(w, g);
    FigureResult {
        name,
        pass: n == 0,
        detail: if n == usize::MAX {
            "size differs".into()
        } else {
            format!("{n} mismatches over {}x{}", g.width, g.height)
        },
    }
}

fn prefix<W: WordSource + ?Sized>(w: &W, width: usize, height: usize) -> CliResult<FiniteWord> {
    Ok(factor_at(
        w,
        &Position::origin(2),
        &Size::new(vec![width as u64, height as u64])?,
    )?)
}

fn sns_word() -> CliResult<impl WordSource> {
    Ok(Arc::new(presets::surd_not_ssurdo_2x2()).fixed_point(Letter(1))?)
}

/// Block read as its rows, top row first, letters concatenated per row.
/// For 1x2 blocks that is the top letter then the bottom letter.
pub fn block_token(b: &FiniteWord) -> String {
    let dims = b.size().dims();
    let (w, h) = (dims[0], dims.get(1).copied().unwrap_or(1));
    let mut s = String::new();
    for y in (0..h).rev() {
        for x in 0..w {
            let c = if dims.len() == 1 { b.get(&[x]) } else { b.get(&[x, y]) };
            s.push_str(&c.0.to_string());
        }
        if w > 1 && y > 0 {
            s.push('/');
        }
    }
    s
}

pub fn return_word_tokens(r: &ReturnWord) -> String {
    r.0.iter().map(block_token).collect::<Vec<_>>().join(" ")
}

/// `code: block block ...` lines; comments start with '#'.
pub fn parse_code_table(text: &str) -> Result<BTreeMap<u32, String>, String> {
    let mut out = BTreeMap::new();
    for line in text.lines().map(str::trim) {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (code, word) = line.split_once(':').ok_or(format!("bad line {line:?}"))?;
        let code = code.trim().parse::<u32>().map_err(|e| e.to_string())?;
        let word = word.split_whitespace().collect::<Vec<_>>().join(" ");
        if out.insert(code, word).is_some() {
            return Err(format!("code {code} listed twice"));
        }
    }
    Ok(out)
}

pub fn derivative_codes(d: &DerivativeWord, height: usize) -> Vec<Option<u32>> {
    let width = d.grid.size().dims()[0] as usize;
    let mut out = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            out.push(d.code(&[x as u64, y as u64]));
        }
    }
    out
}

/// Greek names in the order used by the subgroup figures.
pub const GREEK: &[&str] = &[
    "α", "β", "γ", "δ", "ε", "ζ", "η", "θ", "ι", "κ", "λ", "μ", "ν", "ξ", "ο", "π", "ρ", "σ",
    "τ", "υ", "φ", "χ", "ψ", "ω",
];

/// For a name-labelled grid, whether some injective naming of C(s) members
/// gives, at every non-origin cell, exactly the set of members containing it.
fn subgroup_grid_matches(
    fam: &SubgroupFamily,
    g: &GridFixture,
    fixed: &HashMap<String, usize>,
) -> Result<(), String> {
    if g.width as u64 != fam.modulus || g.height as u64 != fam.modulus {
        return Err("grid size differs from s".into());
    }
    let mut naming: HashMap<String, usize> = fixed.clone();
    // Cells naming a single subgroup settle the bijection first.
    let mut cells = Vec::new();
    for y in 0..g.height {
        for x in 0..g.width {
            if x == 0 && y == 0 {
                continue;
            }
            let names: BTreeSet<String> = g.at(x, y).split(',').map(str::to_string).collect();
            let members: BTreeSet<usize> =
                fam.containing(&[x as u64, y as u64]).into_iter().collect();
            if names.len() != members.len() {
                return Err(format!("cell ({x},{y}): {} names, {} subgroups", names.len(), members.len()));
            }
            if members.len() == 1 {
                let (n, m) = (names.iter().next().unwrap(), *members.iter().next().unwrap());
                if *naming.entry(n.clone()).or_insert(m) != m {
                    return Err(format!("cell ({x},{y}): name {n} used for two subgroups"));
                }
            }
            cells.push((x, y, names, members));
        }
    }
    let used: BTreeSet<usize> = naming.values().copied().collect();
    if used.len() != naming.len() {
        return Err("two names for one subgroup".into());
    }
    for (x, y, names, members) in cells {
        let mapped: Option<BTreeSet<usize>> = names.iter().map(|n| naming.get(n).copied()).collect();
        match mapped {
            Some(m) if m == members => {}
            Some(_) => return Err(format!("cell ({x},{y}) names the wrong subgroups")),
            None => return Err(format!("cell ({x},{y}) uses a name fixed nowhere")),
        }
    }
    if naming.len() != fam.len() {
        return Err(format!("{} names for {} subgroups", naming.len(), fam.len()));
    }
    Ok(())
}

fn parse_pairs(s: &str) -> Result<Vec<Vec<u64>>, String> {
    s.split(')')
        .map(|t| t.trim_matches(|c: char| c == ',' || c == '(' || c.is_whitespace()))
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.split(',')
                .map(|c| c.trim().parse::<u64>().map_err(|e| e.to_string()))
                .collect()
        })
        .collect()
}

/// `name | generators | elements` rows. Returns name → member index.
fn match_subgroup_table(fam: &SubgroupFamily, text: &str) -> Result<HashMap<String, usize>, String> {
    let mut naming = HashMap::new();
    for line in text.lines().map(str::trim) {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split('|').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(format!("bad line {line:?}"));
        }
        let gens: BTreeSet<Vec<u64>> = parse_pairs(parts[1])?.into_iter().collect();
        let elems: BTreeSet<Vec<u64>> = parse_pairs(parts[2])?.into_iter().collect();
        let idx = fam
            .members
            .iter()
            .position(|m| {
                let mine: BTreeSet<Vec<u64>> = m
                    .subgroup
                    .elements()
                    .iter()
                    .filter(|e| !e.is_zero())
                    .map(|e| e.coords().to_vec())
                    .collect();
                mine == elems
            })
            .ok_or(format!("{}: no subgroup with these elements", parts[0]))?;
        let mine: BTreeSet<Vec<u64>> = fam.members[idx]
            .generators
            .iter()
            .map(|g| g.coords().to_vec())
            .collect();
        if mine != gens {
            return Err(format!("{}: generators differ", parts[0]));
        }
        if naming.insert(parts[0].to_string(), idx).is_some() {
            return Err(format!("{} listed twice", parts[0]));
        }
    }
    if naming.len() != fam.len() {
        return Err(format!("table lists {} of {} subgroups", naming.len(), fam.len()));
    }
    Ok(naming)
}

fn verdict(name: &'static str, r: Result<String, String>) -> FigureResult {
    match r {
        Ok(detail) => FigureResult {
            name,
            pass: true,
            detail,
        },
        Err(detail) => FigureResult {
            name,
            pass: false,
            detail,
        },
    }
}

pub const FIXTURES: &[&str] = &[
    "preimage.txt",
    "surd_not_ssurdo.txt",
    "fib_rows.txt",
    "toeplitz_rows.txt",
    "der1.txt",
    "der2.txt",
    "table_codes.txt",
    "subgroups_s5.txt",
    "subgroups_s6.txt",
    "subgroups_s6_table.txt",
];

/// Uniform derivative box used for the code table: 27 wide and tall enough
/// for every listed return word to appear.
pub const UNIFORM_BOX: [u64; 2] = [27, 27];

pub fn derivative_horizon() -> u64 {
    5000
}

/// Regenerates every figure and compares it with its golden.
pub fn verify_figures(dir: &Path) -> CliResult<Vec<FigureResult>> {
    if !dir.is_dir() {
        return Err(CliError::FixtureMissing(dir.to_path_buf()));
    }
    let present = FIXTURES.iter().filter(|f| dir.join(f).is_file()).count();
    if present == 0 {
        return Err(CliError::FixtureMissing(dir.to_path_buf()));
    }
    let mut out = Vec::new();

    let g = grid(dir, "preimage.txt")?;
    let phi3 = presets::preimage_3x2().iterate(Letter(1), 3)?;
    out.push(compare_block("preimage", &phi3, &g));

    let g = grid(dir, "surd_not_ssurdo.txt")?;
    let sns = sns_word()?;
    out.push(compare_block("surd-not-ssurdo", &prefix(&sns, g.width, g.height)?, &g));

    // Pascal's triangle modulo 2 after five iterations.
    let sier = presets::sierpinski().iterate(Letter(1), 5)?;
    let bad_cells = {
        let mut n = 0;
        multirec_core::lattice::for_each_in_box(sier.size().dims(), |p| {
            if (sier.get(p).0 == 1) != (p[0] & p[1] == 0) {
                n += 1;
            }
        });
        n
    };
    out.push(FigureResult {
        name: "sierpinski",
        pass: bad_cells == 0 && sier.size().dims() == [32, 32],
        detail: format!("{bad_cells} cells off the parity pattern over 32x32"),
    });

    let g = grid(dir, "fib_rows.txt")?;
    out.push(compare_block("fib-rows", &prefix(&fib_rows_word(), g.width, g.height)?, &g));

    let g = grid(dir, "toeplitz_rows.txt")?;
    out.push(compare_block(
        "toeplitz-rows",
        &prefix(&toeplitz_rows_word(), g.width, g.height)?,
        &g,
    ));

    let s12 = Size::new(vec![1, 2])?;
    let g = grid(dir, "der1.txt")?;
    let box1 = Size::new(vec![g.width as u64, g.height as u64])?;
    let der1 = derivative_per_direction(&sns, &s12, &box1, derivative_horizon())?;
    out.push(compare_block("der1", &der1.grid, &g));

    let g = grid(dir, "der2.txt")?;
    let want = g.codes().map_err(|r| bad(dir, "der2.txt", r))?;
    let uni = derivative_uniform(
        &sns,
        &s12,
        &Size::new(UNIFORM_BOX.to_vec())?,
        derivative_horizon(),
    )?;
    let got = if g.width as u64 == UNIFORM_BOX[0] && g.height as u64 <= UNIFORM_BOX[1] {
        Some(derivative_codes(&uni, g.height))
    } else {
        None
    };
    out.push(verdict(
        "der2",
        match got {
            Some(got) if equal_up_to_bijection(&got, &want) => {
                Ok("equal up to a code bijection".into())
            }
            Some(_) => Err("no code bijection maps the regenerated grid onto the figure".into()),
            None => Err("figure does not fit the uniform box".into()),
        },
    ));

    let text = read(dir, "table_codes.txt")?;
    let table = parse_code_table(&text).map_err(|r| bad(dir, "table_codes.txt", r))?;
    let uni_table = uni.uniform_table.as_ref().expect("uniform scheme has a table");
    let mine: BTreeSet<String> = uni_table.entries().map(|(_, r)| return_word_tokens(r)).collect();
    let theirs: BTreeSet<String> = table.values().cloned().collect();
    out.push(verdict(
        "table-codes",
        if uni_table.len() != table.len() {
            Err(format!("{} codes regenerated, {} listed", uni_table.len(), table.len()))
        } else if mine != theirs {
            let missing: Vec<&String> = theirs.difference(&mine).collect();
            Err(format!("return words differ; missing {missing:?}"))
        } else {
            Ok(format!("{} return words match", table.len()))
        },
    ));

    let g = grid(dir, "subgroups_s5.txt")?;
    let fam5 = family_c(5, 2)?;
    out.push(verdict(
        "subgroups-s5",
        subgroup_grid_matches(&fam5, &g, &HashMap::new())
            .map(|_| format!("{} subgroups", fam5.len())),
    ));

    let g = grid(dir, "subgroups_s6.txt")?;
    let text = read(dir, "subgroups_s6_table.txt")?;
    let fam6 = family_c(6, 2)?;
    out.push(verdict(
        "subgroups-s6",
        match_subgroup_table(&fam6, &text)
            .and_then(|naming| subgroup_grid_matches(&fam6, &g, &naming))
            .map(|_| format!("{} subgroups", fam6.len())),
    ));

    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_header_and_cells() {
        let g = GridFixture::parse("dims=3x2 alphabet=2\n1 0 1\n? 1 0\n").unwrap();
        assert_eq!((g.width, g.height, g.alphabet), (3, 2, 2));
        assert_eq!(g.at(0, 0), "?");
        assert_eq!(g.codes().unwrap(), vec![None, Some(1), Some(0), Some(1), Some(0), Some(1)]);
        assert!(g.to_word().is_err());
        assert!(GridFixture::parse("dims=3x3 alphabet=2\n1 0 1\n").is_err());
        assert!(GridFixture::parse("alphabet=2\n1\n").is_err());
    }

    #[test]
    fn block_tokens() {
        let b = FiniteWord::from_rows(&[&[0], &[1]]).unwrap();
        assert_eq!(block_token(&b), "10");
        let b = FiniteWord::from_rows(&[&[0, 1], &[1, 1]]).unwrap();
        assert_eq!(block_token(&b), "11/01");
    }

    #[test]
    fn code_table_parsing() {
        let t = parse_code_table("# c\n0: 01 10\n1:  01\n").unwrap();
        assert_eq!(t[&0], "01 10");
        assert_eq!(t[&1], "01");
        assert!(parse_code_table("0: 1\n0: 2\n").is_err());
    }

    #[test]
    fn missing_directory_and_empty_set() {
        let dir = std::env::temp_dir().join("multirec-no-such-fixtures");
        assert!(matches!(verify_figures(&dir), Err(CliError::FixtureMissing(_))));
        let empty = std::env::temp_dir().join(format!("multirec-empty-{}", std::process::id()));
        fs::create_dir_all(&empty).unwrap();
        assert!(matches!(verify_figures(&empty), Err(CliError::FixtureMissing(_))));
        fs::remove_dir_all(&empty).unwrap();
    }

    #[test]
    fn s6_table_names_every_subgroup() {
        let text = read(&default_fixture_dir(), "subgroups_s6_table.txt").unwrap();
        let naming = match_subgroup_table(&family_c(6, 2).unwrap(), &text).unwrap();
        assert_eq!(naming.len(), 12);
    }
}
