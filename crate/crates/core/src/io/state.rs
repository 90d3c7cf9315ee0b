//! Binary session file.
//!
//! All integers are little-endian `u64` unless noted, reals are
//! little-endian IEEE-754 `f64`. Layout, version 1:
//!
//! ```text
//! magic            8 bytes  "DYNREG\0\0"
//! version          u32
//! backend          u8       0 srht, 1 countsketch, 2 exact
//! mode             u8       0 paper-exact, 1 practical
//! eps, c_srht, c_countsketch   f64 ×3
//! seed, refresh_interval       u64 ×2
//! rows_override    u64      0 when unset
//! m, max_node_edges, n         u64 ×3
//! node ids         u64 ×n   row order
//! edge count E     u64, then E pairs (u, v)
//! b                f64 ×n
//! sketch kind      u8       0 srht, 1 countsketch, 2 identity
//!   srht:          n_logical, n_padded, signs i8 ×n_padded, r, samples u64 ×r, seed
//!   countsketch:   q, seed, columns, (row u64, sign i8) ×columns,
//!                  rng key 32 bytes, rng word position u128
//! state rows n, updates_since_refresh
//! sm, sm_pinv      rows, cols, f64 ×rows·cols (row-major)
//! sb, x_approx     len, f64 ×len
//! ```

use std::io::{Read, Write};

use crate::engine::{Backend, EngineConfig, RegressionState, Sketch};
use crate::error::{Error, Result};
use crate::graphstore::{DynamicGraph, GraphStore, NodeId};
use crate::numkit::{DenseMatrix, DenseVector};
use crate::session::Session;
use crate::sketch::{
    CountSketch, SizingConstants, SizingMode, SketchEntry, SketchRng, SrhtSketch,
};

pub const MAGIC: [u8; 8] = *b"DYNREG\0\0";
pub const VERSION: u32 = 1;

/// Upper bound on any stored length, to fail fast on garbage input.
const MAX_LEN: u64 = 1 << 40;

struct Out<W> {
    w: W,
}

impl<W: Write> Out<W> {
    fn bytes(&mut self, b: &[u8]) -> Result<()> {
        self.w.write_all(b)?;
        Ok(())
    }
    fn u8(&mut self, x: u8) -> Result<()> {
        self.bytes(&[x])
    }
    fn u64(&mut self, x: u64) -> Result<()> {
        self.bytes(&x.to_le_bytes())
    }
    fn len(&mut self, x: usize) -> Result<()> {
        self.u64(x as u64)
    }
    fn f64(&mut self, x: f64) -> Result<()> {
        self.bytes(&x.to_le_bytes())
    }
    fn matrix(&mut self, m: &DenseMatrix<f64>) -> Result<()> {
        self.len(m.rows())?;
        self.len(m.cols())?;
        m.as_slice().iter().try_for_each(|&x| self.f64(x))
    }
    fn vector(&mut self, v: &DenseVector<f64>) -> Result<()> {
        self.len(v.len())?;
        v.iter().try_for_each(|&x| self.f64(x))
    }
}

struct In<R> {
    r: R,
}

impl<R: Read> In<R> {
    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut buf = [0u8; N];
        self.r
            .read_exact(&mut buf)
            .map_err(|e| match e.kind() {
                std::io::ErrorKind::UnexpectedEof => Error::StateFormat("truncated file".into()),
                _ => e.into(),
            })?;
        Ok(buf)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.array::<1>()?[0])
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.array()?))
    }
    fn len(&mut self) -> Result<usize> {
        let x = self.u64()?;
        if x > MAX_LEN {
            return Err(Error::StateFormat(format!("implausible length {x}")));
        }
        Ok(x as usize)
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.array()?))
    }
    fn sign(&mut self) -> Result<i8> {
        match self.u8()? as i8 {
            s @ (1 | -1) => Ok(s),
            s => Err(Error::StateFormat(format!("bad sign {s}"))),
        }
    }
    fn matrix(&mut self) -> Result<DenseMatrix<f64>> {
        let rows = self.len()?;
        let cols = self.len()?;
        let data = (0..rows * cols).map(|_| self.f64()).collect::<Result<_>>()?;
        DenseMatrix::from_vec(rows, cols, data)
    }
    fn vector(&mut self) -> Result<DenseVector<f64>> {
        let len = self.len()?;
        Ok(DenseVector::from_vec(
            (0..len).map(|_| self.f64()).collect::<Result<_>>()?,
        ))
    }
}

pub fn write_session(s: &Session<f64>, w: impl Write) -> Result<()> {
    let mut out = Out { w };
    out.bytes(&MAGIC)?;
    out.bytes(&VERSION.to_le_bytes())?;

    let st = s.state();
    let c = st.config();
    out.u8(match c.backend {
        Backend::Srht => 0,
        Backend::CountSketch => 1,
        Backend::Exact => 2,
    })?;
    out.u8(match c.mode {
        SizingMode::PaperExact => 0,
        SizingMode::Practical => 1,
    })?;
    out.f64(c.eps)?;
    out.f64(c.constants.srht)?;
    out.f64(c.constants.countsketch)?;
    out.u64(c.seed)?;
    out.u64(c.refresh_interval)?;
    out.len(c.rows_override.unwrap_or(0))?;

    let store = s.store();
    let g = store.graph();
    out.len(store.m())?;
    out.len(store.max_node_edges())?;
    out.len(g.len())?;
    for id in g.node_ids() {
        out.u64(id)?;
    }
    out.len(g.edge_count())?;
    for (u, v) in g.edges() {
        out.u64(u)?;
        out.u64(v)?;
    }
    for &x in s.measured().iter() {
        out.f64(x)?;
    }

    match st.sketch() {
        Sketch::Srht(sk) => {
            out.u8(0)?;
            out.len(sk.n_logical())?;
            out.len(sk.n_padded())?;
            for &x in sk.signs() {
                out.u8(x as u8)?;
            }
            out.len(sk.rows())?;
            for &x in sk.samples() {
                out.len(x)?;
            }
            out.u64(sk.seed())?;
        }
        Sketch::CountSketch(sk) => {
            out.u8(1)?;
            out.len(sk.rows())?;
            out.u64(sk.seed())?;
            out.len(sk.n())?;
            for e in sk.entries() {
                out.len(e.row)?;
                out.u8(e.sign as u8)?;
            }
            out.bytes(&sk.rng().key())?;
            out.bytes(&sk.rng().word_pos().to_le_bytes())?;
        }
        Sketch::Identity => out.u8(2)?,
    }

    out.len(st.n)?;
    out.u64(st.updates_since_refresh)?;
    out.matrix(&st.sm)?;
    out.matrix(&st.sm_pinv)?;
    out.vector(&st.sb)?;
    out.vector(&st.x_approx)?;
    out.w.flush()?;
    Ok(())
}

pub fn read_session(r: impl Read) -> Result<Session<f64>> {
    let mut inp = In { r };
    if inp.array::<8>()? != MAGIC {
        return Err(Error::StateFormat("not a state file".into()));
    }
    let version = u32::from_le_bytes(inp.array()?);
    if version != VERSION {
        return Err(Error::StateFormat(format!("unsupported version {version}")));
    }

    let backend = match inp.u8()? {
        0 => Backend::Srht,
        1 => Backend::CountSketch,
        2 => Backend::Exact,
        x => return Err(Error::StateFormat(format!("bad backend tag {x}"))),
    };
    let mode = match inp.u8()? {
        0 => SizingMode::PaperExact,
        1 => SizingMode::Practical,
        x => return Err(Error::StateFormat(format!("bad mode tag {x}"))),
    };
    let eps = inp.f64()?;
    let constants = SizingConstants {
        srht: inp.f64()?,
        countsketch: inp.f64()?,
    };
    let seed = inp.u64()?;
    let refresh_interval = inp.u64()?;
    let rows_override = Some(inp.len()?).filter(|&r| r > 0);
    let config = EngineConfig {
        backend,
        eps,
        mode,
        constants,
        seed,
        refresh_interval,
        rows_override,
    };

    let m = inp.len()?;
    let max_node_edges = inp.len()?;
    let n = inp.len()?;
    let mut g = DynamicGraph::new();
    for _ in 0..n {
        let id: NodeId = inp.u64()?;
        g.add_node(id)
            .map_err(|e| Error::StateFormat(format!("node list: {e}")))?;
    }
    let edges = inp.len()?;
    for _ in 0..edges {
        let (u, v) = (inp.u64()?, inp.u64()?);
        g.add_edge(u, v)
            .map_err(|e| Error::StateFormat(format!("edge list: {e}")))?;
    }
    let b = DenseVector::from_vec((0..n).map(|_| inp.f64()).collect::<Result<_>>()?);

    let sketch = match inp.u8()? {
        0 => {
            let n_logical = inp.len()?;
            let n_padded = inp.len()?;
            let signs = (0..n_padded).map(|_| inp.sign()).collect::<Result<_>>()?;
            let r = inp.len()?;
            let samples = (0..r).map(|_| inp.len()).collect::<Result<_>>()?;
            let seed = inp.u64()?;
            Sketch::Srht(SrhtSketch::from_parts(n_logical, signs, samples, seed)?)
        }
        1 => {
            let q = inp.len()?;
            let seed = inp.u64()?;
            let cols = inp.len()?;
            let entries = (0..cols)
                .map(|_| {
                    Ok(SketchEntry {
                        row: inp.len()?,
                        sign: inp.sign()?,
                    })
                })
                .collect::<Result<_>>()?;
            let key = inp.array::<32>()?;
            let word_pos = u128::from_le_bytes(inp.array()?);
            let rng = SketchRng::from_parts(key, word_pos);
            Sketch::CountSketch(CountSketch::from_parts(q, entries, seed, rng)?)
        }
        2 => Sketch::Identity,
        x => return Err(Error::StateFormat(format!("bad sketch tag {x}"))),
    };

    let state_n = inp.len()?;
    let updates_since_refresh = inp.u64()?;
    let sm = inp.matrix()?;
    let sm_pinv = inp.matrix()?;
    let sb = inp.vector()?;
    let x_approx = inp.vector()?;
    if inp.r.read(&mut [0u8; 1])? != 0 {
        return Err(Error::StateFormat("trailing bytes".into()));
    }

    let consistent = state_n == n
        && sm.cols() == m
        && sm_pinv.shape() == (m, sm.rows())
        && sb.len() == sm.rows()
        && x_approx.len() == m
        && match &sketch {
            Sketch::Srht(s) => s.n_logical() == n && s.rows() == sm.rows(),
            Sketch::CountSketch(s) => s.n() == n && s.rows() == sm.rows(),
            Sketch::Identity => sm.rows() == n,
        }
        && (backend == Backend::Exact) == matches!(sketch, Sketch::Identity);
    if !consistent {
        return Err(Error::StateFormat("sections disagree in size".into()));
    }

    let store = GraphStore::new(g, m)?.with_max_node_edges(max_node_edges);
    let state = RegressionState {
        config,
        sketch,
        sm,
        sm_pinv,
        sb,
        x_approx,
        n,
        updates_since_refresh,
    };
    Ok(Session::from_parts(store, b, state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphstore::generators;
    use crate::session::UpdateRecord;

    fn sample(backend: Backend) -> Session<f64> {
        let g = generators::erdos_renyi(30, 50, 2);
        let b = DenseVector::from_vec((0..30).map(|i| (i as f64).sin()).collect());
        let mut s = Session::new(g, b, 3, &EngineConfig::new(backend, 0.5, 4)).unwrap();
        s.apply(&UpdateRecord::NodeInsert {
            id: 77,
            value: 0.5,
            neighbors: vec![1, 2],
        })
        .unwrap();
        s
    }

    fn bytes(s: &Session<f64>) -> Vec<u8> {
        let mut out = Vec::new();
        write_session(s, &mut out).unwrap();
        out
    }

    #[test]
    fn round_trip_is_bit_exact() {
        for backend in Backend::ALL {
            let s = sample(backend);
            let first = bytes(&s);
            let back = read_session(first.as_slice()).unwrap();
            assert_eq!(back.state(), s.state());
            assert_eq!(back.measured(), s.measured());
            assert_eq!(back.graph(), s.graph());
            assert_eq!(bytes(&back), first);
        }
    }

    #[test]
    fn restored_countsketch_continues_its_stream() {
        let mut a = sample(Backend::CountSketch);
        let mut b = read_session(bytes(&a).as_slice()).unwrap();
        let rec = UpdateRecord::NodeInsert {
            id: 78,
            value: 1.0,
            neighbors: vec![3],
        };
        a.apply(&rec).unwrap();
        b.apply(&rec).unwrap();
        assert_eq!(bytes(&a), bytes(&b));
    }

    #[test]
    fn rejects_damage() {
        let good = bytes(&sample(Backend::Srht));
        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(read_session(bad.as_slice()).is_err());
        let mut bad = good.clone();
        bad[8] = 9;
        assert!(read_session(bad.as_slice()).is_err());
        assert!(read_session(&good[..good.len() - 3]).is_err());
        let mut long = good.clone();
        long.push(0);
        assert!(read_session(long.as_slice()).is_err());
    }
}
