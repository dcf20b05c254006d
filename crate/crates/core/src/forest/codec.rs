//! Binary model container, little-endian throughout.
//!
//! ```text
//! forest  := "BSFOREST" u16:version params str:registry_version
//!            u32:k u32*k:subset  u32:k f64*k:imputation
//!            u32:trees (u32:nodes node*nodes)*trees
//! params  := u32:n_trees u32:max_features u32:min_samples_leaf
//!            u32:max_depth(0 = unlimited) u8:bootstrap u64:seed
//! node    := u8:1 u32:feature f64:threshold     (internal, preorder)
//!          | u8:0 f64:fraction u32:samples      (leaf)
//! str     := u32:len bytes
//! ```

use super::{ForestError, ForestModel, ForestParams, TreeNode};

pub(crate) const FOREST_MAGIC: &[u8; 8] = b"BSFOREST";
pub(crate) const FOREST_VERSION: u16 = 1;

pub(crate) struct Writer {
    pub buf: Vec<u8>,
}

impl Writer {
    pub fn new() -> Self {
        Writer { buf: Vec::new() }
    }
    pub fn bytes(&mut self, b: &[u8]) {
        self.buf.extend_from_slice(b);
    }
    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }
    pub fn u16(&mut self, v: u16) {
        self.bytes(&v.to_le_bytes());
    }
    pub fn u32(&mut self, v: usize) {
        let v = u32::try_from(v).expect("value fits in u32");
        self.bytes(&v.to_le_bytes());
    }
    pub fn u64(&mut self, v: u64) {
        self.bytes(&v.to_le_bytes());
    }
    pub fn f64(&mut self, v: f64) {
        self.bytes(&v.to_le_bytes());
    }
    pub fn str(&mut self, s: &str) {
        self.u32(s.len());
        self.bytes(s.as_bytes());
    }
}

pub(crate) struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

fn short(what: &str) -> ForestError {
    ForestError::Format(format!("truncated while reading {what}"))
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }
    pub fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8], ForestError> {
        let end = self.pos.checked_add(n).ok_or_else(|| short(what))?;
        let s = self.buf.get(self.pos..end).ok_or_else(|| short(what))?;
        self.pos = end;
        Ok(s)
    }
    pub fn u8(&mut self, what: &str) -> Result<u8, ForestError> {
        Ok(self.take(1, what)?[0])
    }
    pub fn u16(&mut self, what: &str) -> Result<u16, ForestError> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }
    pub fn u32(&mut self, what: &str) -> Result<usize, ForestError> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()) as usize)
    }
    pub fn u64(&mut self, what: &str) -> Result<u64, ForestError> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
    pub fn f64(&mut self, what: &str) -> Result<f64, ForestError> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
    pub fn str(&mut self, what: &str) -> Result<String, ForestError> {
        let n = self.u32(what)?;
        String::from_utf8(self.take(n, what)?.to_vec())
            .map_err(|_| ForestError::Format(format!("{what} is not UTF-8")))
    }
    pub fn done(&self) -> bool {
        self.pos == self.buf.len()
    }
}

pub fn encode_forest(model: &ForestModel) -> Vec<u8> {
    let mut w = Writer::new();
    write_forest(&mut w, model);
    w.buf
}

pub(crate) fn write_forest(w: &mut Writer, m: &ForestModel) {
    w.bytes(FOREST_MAGIC);
    w.u16(FOREST_VERSION);
    let p = &m.params;
    w.u32(p.n_trees);
    w.u32(p.max_features.unwrap_or(0));
    w.u32(p.min_samples_leaf);
    w.u32(p.max_depth.unwrap_or(0));
    w.u8(u8::from(p.bootstrap));
    w.u64(p.rng_seed);
    w.str(&m.registry_version);
    w.u32(m.feature_subset.len());
    for &f in &m.feature_subset {
        w.u32(f);
    }
    w.u32(m.imputation.len());
    for &v in &m.imputation {
        w.f64(v);
    }
    w.u32(m.trees.len());
    for t in &m.trees {
        w.u32(t.node_count());
        write_node(w, t);
    }
}

fn write_node(w: &mut Writer, node: &TreeNode) {
    match node {
        TreeNode::Internal {
            feature,
            threshold,
            left,
            right,
        } => {
            w.u8(1);
            w.u32(*feature);
            w.f64(*threshold);
            write_node(w, left);
            write_node(w, right);
        }
        TreeNode::Leaf { fraction, samples } => {
            w.u8(0);
            w.f64(*fraction);
            w.u32(*samples);
        }
    }
}

pub fn decode_forest(bytes: &[u8]) -> Result<ForestModel, ForestError> {
    let mut r = Reader::new(bytes);
    let m = read_forest(&mut r)?;
    if !r.done() {
        return Err(ForestError::Format("trailing bytes after forest".into()));
    }
    Ok(m)
}

pub(crate) fn read_forest(r: &mut Reader<'_>) -> Result<ForestModel, ForestError> {
    if r.take(8, "magic")? != FOREST_MAGIC {
        return Err(ForestError::Format("not a forest model (bad magic)".into()));
    }
    let version = r.u16("version")?;
    if version != FOREST_VERSION {
        return Err(ForestError::Format(format!("unsupported forest version {version}")));
    }
    let n_trees = r.u32("n_trees")?;
    let max_features = r.u32("max_features")?;
    let min_samples_leaf = r.u32("min_samples_leaf")?;
    let max_depth = r.u32("max_depth")?;
    let bootstrap = r.u8("bootstrap")? != 0;
    let rng_seed = r.u64("seed")?;
    let params = ForestParams {
        n_trees,
        max_features: (max_features > 0).then_some(max_features),
        min_samples_leaf,
        max_depth: (max_depth > 0).then_some(max_depth),
        bootstrap,
        rng_seed,
    };
    let registry_version = r.str("registry version")?;
    let k = r.u32("subset length")?;
    let feature_subset = (0..k).map(|_| r.u32("subset")).collect::<Result<Vec<_>, _>>()?;
    let k = r.u32("imputation length")?;
    if k != feature_subset.len() {
        return Err(ForestError::Format("imputation table does not cover the feature subset".into()));
    }
    let imputation = (0..k).map(|_| r.f64("imputation")).collect::<Result<Vec<_>, _>>()?;
    let count = r.u32("tree count")?;
    if count == 0 {
        return Err(ForestError::Format("forest has no trees".into()));
    }
    let mut trees = Vec::with_capacity(count.min(4096));
    for _ in 0..count {
        let nodes = r.u32("node count")?;
        let mut budget = nodes;
        let t = read_node(r, &mut budget, feature_subset.len())?;
        if budget != 0 {
            return Err(ForestError::Format("node count mismatch".into()));
        }
        trees.push(t);
    }
    Ok(ForestModel {
        trees,
        params,
        imputation,
        registry_version,
        feature_subset,
    })
}

fn read_node(r: &mut Reader<'_>, budget: &mut usize, width: usize) -> Result<TreeNode, ForestError> {
    if *budget == 0 {
        return Err(ForestError::Format("node count mismatch".into()));
    }
    *budget -= 1;
    match r.u8("node tag")? {
        0 => {
            let fraction = r.f64("leaf fraction")?;
            if !(0.0..=1.0).contains(&fraction) {
                return Err(ForestError::Format(format!("leaf fraction {fraction} outside [0,1]")));
            }
            Ok(TreeNode::Leaf {
                fraction,
                samples: r.u32("leaf samples")?,
            })
        }
        1 => {
            let feature = r.u32("split feature")?;
            if feature >= width {
                return Err(ForestError::Format(format!("split feature {feature} outside subset")));
            }
            let threshold = r.f64("threshold")?;
            let left = Box::new(read_node(r, budget, width)?);
            let right = Box::new(read_node(r, budget, width)?);
            Ok(TreeNode::Internal {
                feature,
                threshold,
                left,
                right,
            })
        }
        tag => Err(ForestError::Format(format!("unknown node tag {tag}"))),
    }
}
