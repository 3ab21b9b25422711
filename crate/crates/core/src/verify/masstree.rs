//! Cantor-type subset of a shrinking-target limsup set, built level by level
//! (ball → big rectangles → shrunk rectangle → balls) with its mass distribution.

use std::collections::HashMap;
use std::rc::Rc;

use serde::Serialize;

use crate::applications::shrinking_profile;
use crate::cantor::Scale;
use crate::{Anchor, CantorAxisSpec, Error, Result};

const POINT_LIMIT: usize = 4_000_000;
const TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Root,
    Big,
    Shrunk,
    Ball,
}

/// Axis-parallel box `∏ [cᵢ − rᵢ, cᵢ + rᵢ]` carrying mass `mu`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Node {
    pub id: usize,
    pub kind: NodeKind,
    /// Construction stage; the root is stage 0.
    pub level: usize,
    pub center: Vec<f64>,
    pub radii: Vec<f64>,
    pub mu: f64,
    pub parent: Option<usize>,
    #[serde(skip)]
    pub children: Vec<usize>,
    /// Unnormalized share of the parent's mass among siblings.
    #[serde(skip)]
    pub weight: f64,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// Scales used at one construction stage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stage {
    /// Level `nₖ` of the resonant points.
    pub n: u32,
    /// Radius `e^{-nₖ·max(aᵢ+tᵢ)}` of the stage's balls.
    pub ball_radius: f64,
    /// Cylinder depth of the ball centres, per direction.
    pub ball_levels: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeConfig {
    pub depth: usize,
    /// `nₖ ≥ growth·nₖ₋₁`.
    pub growth: u32,
    pub node_budget: usize,
    /// Most big rectangles kept per direction inside one ball.
    pub big_cap: Option<usize>,
    /// Most balls kept per direction inside one shrunk rectangle.
    pub ball_cap: Option<usize>,
}

impl TreeConfig {
    pub fn new(depth: usize) -> Self {
        Self {
            depth,
            growth: 4,
            node_budget: 2_000_000,
            big_cap: None,
            ball_cap: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassTree {
    pub axes: Vec<CantorAxisSpec>,
    pub t: Vec<f64>,
    pub stages: Vec<Stage>,
    pub nodes: Vec<Node>,
}

impl MassTree {
    pub fn depth(&self) -> usize {
        self.stages.len()
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn leaves(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.is_leaf())
    }

    /// Radius of the deepest balls.
    pub fn min_radius(&self) -> f64 {
        self.stages.last().map_or(0.5, |s| s.ball_radius)
    }

    pub fn count(&self, kind: NodeKind, level: usize) -> usize {
        self.nodes
            .iter()
            .filter(|n| n.kind == kind && n.level == level)
            .count()
    }
}

/// Level schedule `n₁ < n₂ < …`: each stage's big cylinders fit inside the
/// previous balls and its balls are at least 5 times smaller.
pub fn plan_stages(
    axes: &[CantorAxisSpec],
    t: &[f64],
    depth: usize,
    growth: u32,
) -> Result<Vec<Stage>> {
    shrinking_profile(axes, t)?;
    if depth == 0 {
        return Err(Error::OutOfRange("depth must be at least 1".into()));
    }
    let top = axes
        .iter()
        .zip(t)
        .map(|(ax, ti)| ax.log_base() + ti)
        .fold(0.0, f64::max);
    let mut stages: Vec<Stage> = Vec::with_capacity(depth);
    let (mut prev_n, mut prev_rho) = (0u32, 0.5f64);
    for k in 1..=depth {
        let start = if k == 1 {
            1
        } else {
            (growth.max(1) * prev_n).max(prev_n + 1)
        };
        let n = (start..start + 4096)
            .find(|&n| {
                let fits = axes
                    .iter()
                    .all(|ax| (-f64::from(n) * ax.log_base()).exp() <= prev_rho);
                k == 1 || (fits && (-f64::from(n) * top).exp() <= prev_rho / 5.0)
            })
            .ok_or_else(|| Error::SizeLimit(format!("no admissible level for stage {k}")))?;
        let rho = (-f64::from(n) * top).exp();
        let ball_levels = axes
            .iter()
            .map(|ax| {
                ((-rho.ln() / ax.log_base()) - 1e-9)
                    .ceil()
                    .max(f64::from(n)) as u32
            })
            .collect();
        stages.push(Stage {
            n,
            ball_radius: rho,
            ball_levels,
        });
        (prev_n, prev_rho) = (n, rho);
    }
    Ok(stages)
}

struct Axis<'a> {
    index: usize,
    spec: &'a CantorAxisSpec,
    anchor: &'a Anchor,
    t: f64,
    sc: Scale,
}

impl Axis<'_> {
    fn num(&self, x: f64) -> i128 {
        (x * self.sc.den() as f64).floor() as i128
    }

    fn coord(&self, x: i128) -> f64 {
        self.sc.to_f64(x)
    }

    fn measure(&self, lo: i128, hi: i128) -> Result<i128> {
        Ok(self.sc.cdf_exact(self.spec, hi)?.0 - self.sc.cdf_exact(self.spec, lo)?.0)
    }
}

struct DirBig {
    x: i128,
    weight: f64,
    balls: Vec<i128>,
}

/// One direction of a stage inside one parent ball.
struct DirStage {
    bigs: Vec<DirBig>,
    big_radius: f64,
    shrunk_radius: f64,
}

fn nearest(mut pts: Vec<i128>, c: i128, cap: Option<usize>) -> Vec<i128> {
    if let Some(cap) = cap {
        if pts.len() > cap {
            pts.sort_by_key(|&x| ((x - c).abs(), x));
            pts.truncate(cap);
            pts.sort_unstable();
        }
    }
    pts
}

fn spaced(pts: &[i128], gap: i128) -> Vec<i128> {
    let mut out: Vec<i128> = Vec::new();
    for &x in pts {
        if out.last().map_or(true, |&last| x - last > gap) {
            out.push(x);
        }
    }
    out
}

fn dir_stage(ax: &Axis, stage: &Stage, c: i128, big_r: i128, cfg: &TreeConfig) -> Result<DirStage> {
    let (n, sc) = (stage.n, &ax.sc);
    let cell = sc.cell(n);
    let nf = f64::from(n);
    let shrunk_radius = (-nf * (ax.spec.log_base() + ax.t)).exp();
    let rho = stage.ball_radius;

    let inside = sc.points_in(
        ax.spec,
        ax.anchor,
        n,
        c - big_r + cell,
        c + big_r - cell,
        POINT_LIMIT,
    )?;
    let meeting: Vec<i128> = inside
        .into_iter()
        .filter(|&x| 2 * (x - c).abs() < big_r + 2 * cell)
        .collect();
    let chosen = nearest(spaced(&meeting, 6 * cell), c, cfg.big_cap);

    let mut bigs = Vec::with_capacity(chosen.len());
    for x in chosen {
        let balls = ball_centres(ax, stage, x, shrunk_radius, rho, cfg)?;
        if balls.is_empty() {
            continue;
        }
        let w = ax.measure(x - cell, x + cell)?;
        bigs.push(DirBig {
            x,
            weight: w as f64,
            balls,
        });
    }
    Ok(DirStage {
        bigs,
        big_radius: ax.coord(cell),
        shrunk_radius,
    })
}

fn ball_centres(
    ax: &Axis,
    stage: &Stage,
    y: i128,
    h: f64,
    rho: f64,
    cfg: &TreeConfig,
) -> Result<Vec<i128>> {
    let sc = &ax.sc;
    let level = stage.ball_levels[ax.index];
    let slack = ax.num((h - rho).max(0.0) + TOL * rho);
    let mut pts = sc.points_in(ax.spec, ax.anchor, level, y - slack, y + slack, POINT_LIMIT)?;
    if pts.is_empty() {
        let wide = sc.points_in(
            ax.spec,
            ax.anchor,
            level,
            y - ax.num(h),
            y + ax.num(h),
            POINT_LIMIT,
        )?;
        pts = wide
            .into_iter()
            .min_by_key(|&x| (x - y).abs())
            .into_iter()
            .collect();
    }
    Ok(nearest(spaced(&pts, ax.num(6.0 * rho)), y, cfg.ball_cap))
}

/// Geometry of the Cantor subset followed by [`assign_mass`].
pub fn build_mass_tree(
    axes: &[CantorAxisSpec],
    anchors: &[Anchor],
    t: &[f64],
    cfg: &TreeConfig,
) -> Result<MassTree> {
    if anchors.len() != axes.len() {
        return Err(Error::InvalidAxis("need one anchor per axis".into()));
    }
    let stages = plan_stages(axes, t, cfg.depth, cfg.growth)?;
    let d = axes.len();
    let dirs = axes
        .iter()
        .zip(anchors)
        .zip(t)
        .enumerate()
        .map(|(i, ((spec, anchor), &t))| {
            let deepest = stages.iter().map(|s| s.ball_levels[i]).max().unwrap_or(1);
            let sc = Scale::new(spec.base(), deepest + anchor.prefix().len() as u32 + 1)?;
            sc.cdf_exact(spec, 0)?;
            Ok(Axis {
                index: i,
                spec,
                anchor,
                t,
                sc,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut nodes = vec![Node {
        id: 0,
        kind: NodeKind::Root,
        level: 0,
        center: vec![0.5; d],
        radii: vec![0.5; d],
        mu: 1.0,
        parent: None,
        children: Vec::new(),
        weight: 1.0,
    }];
    let mut frontier: Vec<(usize, Vec<i128>)> =
        vec![(0, dirs.iter().map(|a| a.sc.den() / 2).collect())];
    let mut parent_r: Vec<i128> = dirs.iter().map(|a| a.sc.den() / 2).collect();

    for (k, stage) in stages.iter().enumerate() {
        let level = k + 1;
        let mut cache: HashMap<(usize, i128), Rc<DirStage>> = HashMap::new();
        let mut next = Vec::new();
        for (pid, centre) in &frontier {
            let per_dir = dirs
                .iter()
                .enumerate()
                .map(|(i, ax)| {
                    if let Some(s) = cache.get(&(i, centre[i])) {
                        return Ok(Rc::clone(s));
                    }
                    let s = Rc::new(dir_stage(ax, stage, centre[i], parent_r[i], cfg)?);
                    cache.insert((i, centre[i]), Rc::clone(&s));
                    Ok(s)
                })
                .collect::<Result<Vec<_>>>()?;
            if per_dir.iter().any(|s| s.bigs.is_empty()) {
                return Err(Error::InvalidInstance(format!(
                    "a stage-{level} ball contains no admissible cylinder"
                )));
            }
            let bigs: usize = per_dir.iter().map(|s| s.bigs.len()).product();
            let balls: usize = per_dir
                .iter()
                .map(|s| s.bigs.iter().map(|b| b.balls.len()).sum::<usize>())
                .product();
            if nodes.len() + 2 * bigs + balls > cfg.node_budget {
                return Err(Error::SizeLimit(format!(
                    "stage {level} exceeds the budget of {} nodes",
                    cfg.node_budget
                )));
            }
            for pick in odometer(per_dir.iter().map(|s| s.bigs.len()).collect()) {
                let chosen: Vec<&DirBig> = pick
                    .iter()
                    .zip(&per_dir)
                    .map(|(&j, s)| &s.bigs[j])
                    .collect();
                let xs: Vec<f64> = chosen
                    .iter()
                    .zip(&dirs)
                    .map(|(b, ax)| ax.coord(b.x))
                    .collect();
                let big = push(
                    &mut nodes,
                    *pid,
                    NodeKind::Big,
                    level,
                    xs.clone(),
                    radii(&per_dir, |s| s.big_radius),
                );
                nodes[big].weight = chosen.iter().map(|b| b.weight).product();
                let shrunk = push(
                    &mut nodes,
                    big,
                    NodeKind::Shrunk,
                    level,
                    xs,
                    radii(&per_dir, |s| s.shrunk_radius),
                );
                for ball in odometer(chosen.iter().map(|b| b.balls.len()).collect()) {
                    let exact: Vec<i128> =
                        ball.iter().zip(&chosen).map(|(&j, b)| b.balls[j]).collect();
                    let centre = exact
                        .iter()
                        .zip(&dirs)
                        .map(|(&x, ax)| ax.coord(x))
                        .collect();
                    let id = push(
                        &mut nodes,
                        shrunk,
                        NodeKind::Ball,
                        level,
                        centre,
                        vec![stage.ball_radius; d],
                    );
                    next.push((id, exact));
                }
            }
        }
        frontier = next;
        parent_r = dirs.iter().map(|ax| ax.num(stage.ball_radius)).collect();
    }

    let mut tree = MassTree {
        axes: axes.to_vec(),
        t: t.to_vec(),
        stages,
        nodes,
    };
    assign_mass(&mut tree);
    Ok(tree)
}

fn radii(per_dir: &[Rc<DirStage>], f: impl Fn(&DirStage) -> f64) -> Vec<f64> {
    per_dir.iter().map(|s| f(s)).collect()
}

fn push(
    nodes: &mut Vec<Node>,
    parent: usize,
    kind: NodeKind,
    level: usize,
    center: Vec<f64>,
    radii: Vec<f64>,
) -> usize {
    let id = nodes.len();
    nodes.push(Node {
        id,
        kind,
        level,
        center,
        radii,
        mu: 0.0,
        parent: Some(parent),
        children: Vec::new(),
        weight: 1.0,
    });
    nodes[parent].children.push(id);
    id
}

/// All index vectors below `sizes`, last index fastest.
fn odometer(sizes: Vec<usize>) -> impl Iterator<Item = Vec<usize>> {
    let total: usize = sizes.iter().product();
    (0..total).map(move |mut flat| {
        let mut idx = vec![0; sizes.len()];
        for (slot, &s) in idx.iter_mut().zip(&sizes).rev() {
            *slot = flat % s;
            flat /= s;
        }
        idx
    })
}

/// Root mass 1; big rectangles split their parent's mass in proportion to their
/// natural measure, shrunk rectangles and balls split it equally.
pub fn assign_mass(tree: &mut MassTree) {
    tree.nodes[0].mu = 1.0;
    for id in 0..tree.nodes.len() {
        let children = std::mem::take(&mut tree.nodes[id].children);
        let total: f64 = children.iter().map(|&c| tree.nodes[c].weight).sum();
        let mu = tree.nodes[id].mu;
        for &c in &children {
            tree.nodes[c].mu = if total > 0.0 {
                mu * tree.nodes[c].weight / total
            } else {
                0.0
            };
        }
        tree.nodes[id].children = children;
    }
}

/// Largest `|μ(node) − Σ μ(children)|` over internal nodes, and `|μ(root) − 1|`.
pub fn check_conservation(tree: &MassTree) -> f64 {
    tree.nodes
        .iter()
        .filter(|n| !n.is_leaf())
        .map(|n| (n.mu - n.children.iter().map(|&c| tree.nodes[c].mu).sum::<f64>()).abs())
        .fold((tree.root().mu - 1.0).abs(), f64::max)
}

/// Every node lies inside its parent (up to rounding).
pub fn check_containment(tree: &MassTree) -> std::result::Result<(), String> {
    for n in tree.nodes.iter().skip(1) {
        let p = &tree.nodes[n.parent.expect("non-root node has a parent")];
        let ok = n
            .center
            .iter()
            .zip(&n.radii)
            .zip(p.center.iter().zip(&p.radii))
            .all(|((c, r), (pc, pr))| (c - pc).abs() + r <= pr * (1.0 + TOL) + 1e-15);
        if !ok {
            return Err(format!("node {} is not inside its parent {}", n.id, p.id));
        }
    }
    Ok(())
}

/// Siblings have pairwise disjoint 3-fold enlargements.
pub fn check_separation(tree: &MassTree) -> std::result::Result<(), String> {
    for p in tree.nodes.iter().filter(|n| n.children.len() > 1) {
        let kids: Vec<&Node> = p.children.iter().map(|&c| &tree.nodes[c]).collect();
        let d = p.center.len();
        // sibling sets are products, so per-direction spacing suffices
        let mut distinct = 1usize;
        let mut ok = true;
        for i in 0..d {
            let mut coords: Vec<(f64, f64)> =
                kids.iter().map(|k| (k.center[i], k.radii[i])).collect();
            coords.sort_by(|a, b| a.0.total_cmp(&b.0));
            coords.dedup_by(|a, b| a.0 == b.0);
            distinct *= coords.len();
            ok &= coords
                .windows(2)
                .all(|w| w[1].0 - w[0].0 >= 3.0 * (w[0].1 + w[1].1) * (1.0 - TOL));
        }
        let separated = if distinct == kids.len() {
            ok
        } else {
            kids.iter().enumerate().all(|(a, ka)| {
                kids[a + 1..].iter().all(|kb| {
                    (0..d).any(|i| {
                        (ka.center[i] - kb.center[i]).abs()
                            >= 3.0 * (ka.radii[i] + kb.radii[i]) * (1.0 - TOL)
                    })
                })
            })
        };
        if !separated {
            return Err(format!("children of node {} are not 3r-separated", p.id));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn instance() -> (Vec<CantorAxisSpec>, Vec<f64>) {
        (
            vec![
                CantorAxisSpec::full(2).unwrap(),
                CantorAxisSpec::new(3, [0, 2]).unwrap(),
            ],
            vec![2f64.ln(), 0.0],
        )
    }

    #[test]
    fn schedule() {
        let (axes, t) = instance();
        let s = plan_stages(&axes, &t, 3, 4).unwrap();
        let ns: Vec<u32> = s.iter().map(|s| s.n).collect();
        assert_eq!(ns, vec![1, 4, 16]);
        assert!((s[2].ball_radius - 4f64.powi(-16)).abs() < 1e-22);
        assert_eq!(s[2].ball_levels, vec![32, 21]);
    }

    #[test]
    fn dyadic_depth_one() {
        let axes = vec![CantorAxisSpec::full(2).unwrap()];
        let tree = build_mass_tree(
            &axes,
            &[Anchor::tail_only()],
            &[2f64.ln()],
            &TreeConfig::new(1),
        )
        .unwrap();
        let big = tree.nodes.iter().find(|n| n.kind == NodeKind::Big).unwrap();
        let shrunk = &tree.nodes[big.children[0]];
        assert_eq!(big.children.len(), 1);
        assert!((shrunk.radii[0] - 0.25).abs() < 1e-15);
        assert_eq!(shrunk.children.len(), 1);
    }

    #[test]
    fn depth_two_is_consistent() {
        let (axes, t) = instance();
        let tree = build_mass_tree(
            &axes,
            &vec![Anchor::tail_only(); 2],
            &t,
            &TreeConfig::new(2),
        )
        .unwrap();
        assert!(check_conservation(&tree) < 1e-12);
        check_containment(&tree).unwrap();
        check_separation(&tree).unwrap();
        let leaves: f64 = tree.leaves().map(|n| n.mu).sum();
        assert!((leaves - 1.0).abs() < 1e-12);
    }

    fn star(weights: &[f64]) -> MassTree {
        let mut tree = MassTree {
            axes: vec![CantorAxisSpec::full(2).unwrap()],
            t: vec![0.0],
            stages: Vec::new(),
            nodes: vec![Node {
                id: 0,
                kind: NodeKind::Root,
                level: 0,
                center: vec![0.5],
                radii: vec![0.5],
                mu: 0.0,
                parent: None,
                children: Vec::new(),
                weight: 1.0,
            }],
        };
        for (i, &w) in weights.iter().enumerate() {
            let id = push(
                &mut tree.nodes,
                0,
                NodeKind::Big,
                1,
                vec![0.1 + 0.4 * i as f64],
                vec![0.05],
            );
            tree.nodes[id].weight = w;
        }
        assign_mass(&mut tree);
        tree
    }

    #[test]
    fn masses_follow_weights() {
        assert_eq!(star(&[0.3]).nodes[1].mu, 1.0);
        let tree = star(&[2.0, 1.0]);
        assert!((tree.nodes[1].mu - 2.0 / 3.0).abs() < 1e-15);
        assert!((tree.nodes[2].mu - 1.0 / 3.0).abs() < 1e-15);
        assert!(check_conservation(&tree) < 1e-15);
    }

    #[test]
    fn too_deep_hits_the_budget() {
        let (axes, t) = instance();
        let err = build_mass_tree(
            &axes,
            &vec![Anchor::tail_only(); 2],
            &t,
            &TreeConfig::new(4),
        )
        .unwrap_err();
        assert!(matches!(err, Error::SizeLimit(_)));
    }
}
