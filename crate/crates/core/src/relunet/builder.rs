//! Layer-by-layer construction of explicit networks from affine forms.

use super::network::{Layer, ReluNetwork};

/// `c + Σ w_j h_j` over the units `h` of the current top layer (or the input).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Form {
    pub terms: Vec<(usize, f64)>,
    pub c: f64,
}

impl Form {
    pub fn unit(i: usize) -> Self {
        Self { terms: vec![(i, 1.0)], c: 0.0 }
    }

    pub fn constant(c: f64) -> Self {
        Self { terms: Vec::new(), c }
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self { terms: self.terms.iter().map(|&(i, w)| (i, a * w)).collect(), c: a * self.c }
    }

    pub fn plus(&self, other: &Form) -> Self {
        let mut terms = self.terms.clone();
        for &(i, w) in &other.terms {
            match terms.iter_mut().find(|t| t.0 == i) {
                Some(t) => t.1 += w,
                None => terms.push((i, w)),
            }
        }
        terms.retain(|t| t.1 != 0.0);
        Self { terms, c: self.c + other.c }
    }

    pub fn minus(&self, other: &Form) -> Self {
        self.plus(&other.scaled(-1.0))
    }

    pub fn shifted(&self, c: f64) -> Self {
        Self { terms: self.terms.clone(), c: self.c + c }
    }
}

/// Hidden layers are lists of units `σ(form)` over the previous layer.
#[derive(Debug, Clone)]
pub struct NetBuilder {
    input_dim: usize,
    hidden: Vec<Vec<Form>>,
}

impl NetBuilder {
    pub fn new(input_dim: usize) -> Self {
        Self { input_dim, hidden: Vec::new() }
    }

    pub fn depth(&self) -> usize {
        self.hidden.len()
    }

    fn width_of(&self, layer: usize) -> usize {
        if layer == 0 { self.input_dim } else { self.hidden[layer - 1].len() }
    }

    /// Adds a hidden layer of units `σ(u)` and returns a form reading each new unit.
    pub fn push_layer(&mut self, units: Vec<Form>) -> Vec<Form> {
        let n = units.len();
        self.hidden.push(units);
        (0..n).map(Form::unit).collect()
    }

    /// Output map from forms over the top layer; offsets go through an added
    /// constant unit `σ_{-1}(0) = 1`.
    pub fn finish(mut self, outputs: &[Form]) -> ReluNetwork<f64> {
        let needs_const = outputs.iter().any(|o| o.c != 0.0);
        let mut outs: Vec<Form> = outputs.to_vec();
        if needs_const {
            if self.hidden.is_empty() {
                let d = self.input_dim;
                let ids: Vec<Form> = (0..d).flat_map(|i| [Form::unit(i), Form::unit(i).scaled(-1.0)]).collect();
                let carried = self.push_layer(ids);
                outs = outs
                    .iter()
                    .map(|o| {
                        let mut t = Form::constant(o.c);
                        for &(i, w) in &o.terms {
                            t = t.plus(&carried[2 * i].minus(&carried[2 * i + 1]).scaled(w));
                        }
                        t
                    })
                    .collect();
            }
            let last = self.hidden.last_mut().expect("has hidden layer");
            let k = last.len();
            last.push(Form::constant(1.0));
            outs = outs
                .iter()
                .map(|o| {
                    let mut t = Form { terms: o.terms.clone(), c: 0.0 };
                    if o.c != 0.0 {
                        t.terms.push((k, o.c));
                    }
                    t
                })
                .collect();
        }
        let mut layers = Vec::with_capacity(self.hidden.len() + 1);
        for (li, units) in self.hidden.iter().enumerate() {
            let cols = self.width_of(li);
            let w = units.iter().map(|u| dense(u, cols)).collect();
            let v = units.iter().map(|u| if u.c == 0.0 { 0.0 } else { -u.c }).collect();
            layers.push(Layer { w, v });
        }
        let cols = self.width_of(self.hidden.len());
        layers.push(Layer { w: outs.iter().map(|o| dense(o, cols)).collect(), v: Vec::new() });
        ReluNetwork { layers, input_dim: self.input_dim }
    }
}

fn dense(f: &Form, cols: usize) -> Vec<f64> {
    let mut r = vec![0.0; cols];
    for &(i, w) in &f.terms {
        r[i] += w;
    }
    r
}

/// Maxima of several groups of nonnegative signals, reduced in lockstep with
/// `max(a, b) = σ(a) + σ(b - a)`. Adds `⌈log2 max_len⌉` layers.
pub fn max_groups(b: &mut NetBuilder, groups: Vec<Vec<Form>>) -> Vec<Form> {
    let mut groups = groups;
    while groups.iter().any(|g| g.len() > 1) {
        let mut units = Vec::new();
        let mut plan: Vec<Vec<(usize, Option<usize>)>> = Vec::new();
        for g in &groups {
            let mut p = Vec::new();
            for pair in g.chunks(2) {
                let ia = units.len();
                units.push(pair[0].clone());
                if pair.len() == 2 {
                    units.push(pair[1].minus(&pair[0]));
                    p.push((ia, Some(ia + 1)));
                } else {
                    p.push((ia, None));
                }
            }
            plan.push(p);
        }
        let refs = b.push_layer(units);
        groups = plan
            .into_iter()
            .map(|p| {
                p.into_iter()
                    .map(|(a, bb)| match bb {
                        Some(j) => refs[a].plus(&refs[j]),
                        None => refs[a].clone(),
                    })
                    .collect()
            })
            .collect();
    }
    groups.into_iter().map(|mut g| g.pop().unwrap_or_default()).collect()
}
