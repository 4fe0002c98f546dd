//! Monomial tree: a trie over the exponent tuples of a polynomial, supporting
//! bottom-up substitution of integer values with wrap-around 64-bit
//! arithmetic and constant-time rollback.
//!
//! Level 1 holds the top variable, level `D` the leaves (one per term), level
//! 0 is the root. The structure (parents, exponents, leaf coefficients) is
//! immutable and shared between forks; each fork owns its value arrays.

use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use crate::algebra::{bigint_to_wrapping, SparsePoly};
use crate::error::{Error, IoContext, Result};

pub const TREE_MAGIC: [u8; 4] = *b"TQT1";

#[derive(Debug, PartialEq, Eq)]
pub struct TreeShape {
    /// `order[i]` is the polynomial variable at level `i + 1`.
    order: Vec<usize>,
    /// `parents[l]`, `exps[l]` describe the nodes of level `l + 1`.
    parents: Vec<Vec<u32>>,
    exps: Vec<Vec<u8>>,
    max_exp: Vec<u8>,
    leaves: Vec<u64>,
    /// Free-form tag stored in the cache image (the form degree for
    /// discriminant trees, 0 otherwise).
    tag: u8,
}

impl TreeShape {
    pub fn depth(&self) -> usize {
        self.order.len()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn tag(&self) -> u8 {
        self.tag
    }

    /// Node counts for levels `1..=D`.
    pub fn level_sizes(&self) -> Vec<usize> {
        self.parents.iter().map(Vec::len).collect()
    }

    pub fn node_count(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    /// Degree of the top variable.
    pub fn top_degree(&self) -> usize {
        self.max_exp[0] as usize
    }
}

#[derive(Clone, Debug)]
pub struct MonomialTree {
    shape: Arc<TreeShape>,
    /// `values[l]` for levels `0..D`; leaves read from the shape.
    values: Vec<Vec<u64>>,
    cursor: usize,
    /// Deepest level this instance may pop back to.
    floor: usize,
    stack: Vec<i64>,
    pow: Vec<u64>,
}

/// Variables ordered by their degree in `p`, smallest at the top; ties keep
/// the variable index order.
pub fn default_order(p: &SparsePoly) -> Vec<usize> {
    let deg = p.var_degrees();
    let mut order: Vec<usize> = (0..p.nvars()).collect();
    order.sort_by_key(|&v| (deg[v], v));
    order
}

impl MonomialTree {
    pub fn build(p: &SparsePoly, order: &[usize]) -> Result<Self> {
        Self::build_tagged(p, order, 0)
    }

    pub fn build_tagged(p: &SparsePoly, order: &[usize], tag: u8) -> Result<Self> {
        let n = p.nvars();
        if p.is_zero() {
            return Err(Error::EmptyPolynomial);
        }
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&v| v >= n || std::mem::replace(&mut seen[v], true)) {
            return Err(Error::Shape(format!(
                "variable order {order:?} is not a permutation of 0..{n}"
            )));
        }
        let mut rows: Vec<(Vec<u8>, u64)> = p
            .terms()
            .iter()
            .map(|(m, c)| (order.iter().map(|&v| m[v]).collect(), bigint_to_wrapping(c)))
            .collect();
        rows.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let mut parents: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut exps: Vec<Vec<u8>> = vec![Vec::new(); n];
        let mut leaves = Vec::with_capacity(rows.len());
        let mut prev: Option<&[u8]> = None;
        for (t, c) in &rows {
            // first level at which this tuple departs from the previous one
            let split = match prev {
                None => 0,
                Some(q) => q.iter().zip(t).position(|(a, b)| a != b).unwrap_or(n),
            };
            for l in split..n {
                let parent = if l == 0 { 0 } else { parents[l - 1].len() as u32 - 1 };
                parents[l].push(parent);
                exps[l].push(t[l]);
            }
            leaves.push(*c);
            prev = Some(t);
        }
        let max_exp = exps.iter().map(|e| e.iter().copied().max().unwrap_or(0)).collect();
        let shape = TreeShape {
            order: order.to_vec(),
            parents,
            exps,
            max_exp,
            leaves,
            tag,
        };
        Ok(Self::from_shape(Arc::new(shape)))
    }

    pub fn from_shape(shape: Arc<TreeShape>) -> Self {
        let n = shape.depth();
        let mut values = vec![vec![0u64; 1]];
        values.extend(shape.parents[..n - 1].iter().map(|l| vec![0u64; l.len()]));
        let mut pow = vec![0u64; shape.max_exp.iter().copied().max().unwrap_or(0) as usize + 1];
        pow[0] = 1;
        MonomialTree {
            values,
            cursor: n,
            floor: n,
            stack: Vec::with_capacity(n),
            pow,
            shape,
        }
    }

    pub fn shape(&self) -> &Arc<TreeShape> {
        &self.shape
    }

    pub fn depth(&self) -> usize {
        self.shape.depth()
    }

    /// Deepest level whose variable is not yet substituted.
    pub fn cursor(&self) -> usize {
        self.cursor
    }

    /// Substituted values, deepest level first.
    pub fn assignment(&self) -> &[i64] {
        &self.stack
    }

    /// Substitutes `c` for the variable at the cursor level.
    pub fn push(&mut self, c: i64) -> Result<()> {
        let l = self.cursor;
        if l == 0 {
            return Err(Error::StackUnderflow);
        }
        let shape = &*self.shape;
        let pow = &mut self.pow;
        let cw = c as u64;
        for k in 1..=shape.max_exp[l - 1] as usize {
            pow[k] = pow[k - 1].wrapping_mul(cw);
        }
        let (lower, upper) = self.values.split_at_mut(l);
        let dst = &mut lower[l - 1];
        let src: &[u64] = if l == shape.depth() { &shape.leaves } else { &upper[0] };
        dst.fill(0);
        for ((&v, &p), &e) in src.iter().zip(&shape.parents[l - 1]).zip(&shape.exps[l - 1]) {
            let slot = &mut dst[p as usize];
            *slot = slot.wrapping_add(v.wrapping_mul(pow[e as usize]));
        }
        self.cursor -= 1;
        self.stack.push(c);
        Ok(())
    }

    /// Undoes substitutions until the cursor is `n`; no values are touched.
    pub fn pop_to_level(&mut self, n: usize) -> Result<()> {
        if n > self.floor || n < self.cursor {
            return Err(Error::range(
                "pop level",
                n,
                format!("{}..={}", self.cursor, self.floor),
            ));
        }
        self.cursor = n;
        self.stack.truncate(self.depth() - n);
        Ok(())
    }

    /// Coefficients of the polynomial in the top variable, indexed by
    /// exponent, once every other variable is substituted.
    pub fn extract(&self, out: &mut Vec<u64>) -> Result<()> {
        if self.cursor != 1 {
            return Err(Error::State(format!(
                "extract needs cursor 1, cursor is {}",
                self.cursor
            )));
        }
        out.clear();
        out.resize(self.shape.top_degree() + 1, 0);
        let src: &[u64] = if self.depth() == 1 { &self.shape.leaves } else { &self.values[1] };
        for (&v, &e) in src.iter().zip(&self.shape.exps[0]) {
            out[e as usize] = v;
        }
        Ok(())
    }

    pub fn extract_univariate(&self) -> Result<Vec<u64>> {
        let mut out = Vec::new();
        self.extract(&mut out)?;
        Ok(out)
    }

    /// Value of the fully substituted polynomial.
    pub fn root_value(&self) -> Result<u64> {
        if self.cursor != 0 {
            return Err(Error::State(format!(
                "root value needs every level substituted, cursor is {}",
                self.cursor
            )));
        }
        Ok(self.values[0][0])
    }

    /// A copy holding only the value arrays still reachable from the
    /// current cursor; it cannot pop below that cursor.
    pub fn fork_upper(&self) -> Self {
        let keep = (self.cursor + 1).min(self.depth());
        let values = (0..self.depth())
            .map(|l| if l < keep { self.values[l].clone() } else { Vec::new() })
            .collect();
        MonomialTree {
            shape: Arc::clone(&self.shape),
            values,
            cursor: self.cursor,
            floor: self.cursor,
            stack: self.stack.clone(),
            pow: self.pow.clone(),
        }
    }

    /// Bytes used by the shared structure at 16 bytes per node.
    pub fn structure_bytes(&self) -> usize {
        16 * self.shape.node_count()
    }

    pub fn write_image(&self, w: &mut impl Write) -> Result<()> {
        let s = &*self.shape;
        let ctx = || "writing tree image".to_string();
        let n = u8::try_from(s.depth()).map_err(|_| Error::range("tree depth", s.depth(), "1..=255"))?;
        w.write_all(&TREE_MAGIC).ctx(ctx)?;
        w.write_all(&[s.tag, n]).ctx(ctx)?;
        let order: Vec<u8> = s.order.iter().map(|&v| v as u8).collect();
        w.write_all(&order).ctx(ctx)?;
        for l in &s.parents {
            w.write_all(&(l.len() as u64).to_le_bytes()).ctx(ctx)?;
        }
        for (p, e) in s.parents.iter().zip(&s.exps) {
            let mut buf = Vec::with_capacity(p.len() * 5);
            for &x in p {
                buf.extend_from_slice(&x.to_le_bytes());
            }
            buf.extend_from_slice(e);
            w.write_all(&buf).ctx(ctx)?;
        }
        let mut buf = Vec::with_capacity(s.leaves.len() * 8);
        for &c in &s.leaves {
            buf.extend_from_slice(&c.to_le_bytes());
        }
        w.write_all(&buf).ctx(ctx)
    }

    pub fn read_image(r: &mut impl Read) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes).ctx(|| "reading tree image".into())?;
        let mut pos = 0usize;
        let mut take = |len: usize, what: &str| -> Result<&[u8]> {
            let out = bytes
                .get(pos..pos + len)
                .ok_or_else(|| Error::Truncated(format!("tree image: {what} at byte {pos}")))?;
            pos += len;
            Ok(out)
        };
        let magic: [u8; 4] = take(4, "magic")?.try_into().unwrap();
        if magic != TREE_MAGIC {
            return Err(Error::BadMagic {
                found: magic,
                expected: TREE_MAGIC,
            });
        }
        let head = take(2, "header")?;
        let (tag, n) = (head[0], head[1] as usize);
        if n == 0 {
            return Err(Error::parse("tree image header", "depth 0"));
        }
        let order: Vec<usize> = take(n, "order")?.iter().map(|&v| v as usize).collect();
        let mut sizes = Vec::with_capacity(n);
        for _ in 0..n {
            sizes.push(u64::from_le_bytes(take(8, "level size")?.try_into().unwrap()) as usize);
        }
        let mut parents = Vec::with_capacity(n);
        let mut exps = Vec::with_capacity(n);
        for (l, &size) in sizes.iter().enumerate() {
            let p: Vec<u32> = take(size * 4, "parents")?
                .chunks_exact(4)
                .map(|b| u32::from_le_bytes(b.try_into().unwrap()))
                .collect();
            let above = if l == 0 { 1 } else { sizes[l - 1] };
            if p.iter().any(|&x| x as usize >= above) {
                return Err(Error::parse(format!("tree image level {}", l + 1), "parent out of range"));
            }
            parents.push(p);
            exps.push(take(size, "exponents")?.to_vec());
        }
        let leaves: Vec<u64> = take(sizes[n - 1] * 8, "leaf coefficients")?
            .chunks_exact(8)
            .map(|b| u64::from_le_bytes(b.try_into().unwrap()))
            .collect();
        if pos != bytes.len() {
            return Err(Error::parse("tree image", "trailing bytes"));
        }
        let max_exp = exps.iter().map(|e| e.iter().copied().max().unwrap_or(0)).collect();
        Ok(Self::from_shape(Arc::new(TreeShape {
            order,
            parents,
            exps,
            max_exp,
            leaves,
            tag,
        })))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        let mut f = std::io::BufWriter::new(
            std::fs::File::create(&tmp).ctx(|| format!("creating {}", tmp.display()))?,
        );
        self.write_image(&mut f)?;
        f.flush().ctx(|| format!("writing {}", tmp.display()))?;
        drop(f);
        std::fs::rename(&tmp, path).ctx(|| format!("renaming to {}", path.display()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).ctx(|| format!("opening {}", path.display()))?;
        Self::read_image(&mut std::io::BufReader::new(f))
    }
}

/// Interprets a wrapped value as a signed integer in `[−2⁶³, 2⁶³)`.
pub fn signed(v: u64) -> i64 {
    v as i64
}
