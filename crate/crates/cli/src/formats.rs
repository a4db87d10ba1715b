//! JSON input formats. Rationals are strings `"p/q"`, vectors are objects
//! `{id: "p/q"}` over a carrier `[{"id", "deg", "weight"}]`.

use std::collections::BTreeMap;
use std::path::Path;
use std::rc::Rc;

use anyhow::{anyhow, bail, Context};
use serde_json::{json, Value};

use hoalg::graded::{GradedSpace, Sym, Vector};
use hoalg::htt::Contraction;
use hoalg::lin::{multilinear, Lin};
use hoalg::mcspace::vector_from_json;
use hoalg::scalar::fmt_q;
use hoalg::solvers::fixtures::OdeFixture;
use hoalg::solvers::{op_from_table, FPEq, OdeOp, FODE};

pub fn read_json(path: &Path) -> anyhow::Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn vector_json(space: &GradedSpace, v: &Vector) -> Value {
    Value::Object(v.iter().map(|(k, c)| (space.id(k.idx).to_string(), Value::String(fmt_q(c)))).collect())
}

pub fn carrier_from_json(v: &Value) -> anyhow::Result<GradedSpace> {
    let space: GradedSpace = serde_json::from_value(v.clone()).context("carrier")?;
    space.validate()?;
    Ok(space)
}

/// `{id: vector}` as a map on basis elements, zero on missing ids.
fn map_from_json(source: &GradedSpace, target: &GradedSpace, v: &Value) -> anyhow::Result<Vec<Vector>> {
    let mut images = vec![Lin::zero(); source.dim()];
    if let Some(obj) = v.as_object() {
        for (id, img) in obj {
            let idx = source.index_of(id).ok_or_else(|| anyhow!("unknown id {id}"))?;
            images[idx] = vector_from_json(target, img)?;
        }
    }
    Ok(images)
}

fn lin_map(images: Vec<Vector>) -> Rc<dyn Fn(&Sym) -> Vector> {
    Rc::new(move |s: &Sym| images[s.idx].clone())
}

/// `{"small": carrier, "i": {small_id: vec}, "p": {big_id: vec}, "h": {big_id: vec}}`.
/// The small differential is `p d i`.
pub fn contraction_from_json(
    big: &GradedSpace,
    big_d: impl Fn(&Sym) -> Vector,
    v: &Value,
) -> anyhow::Result<(GradedSpace, Contraction<Sym, Sym>)> {
    let small = carrier_from_json(&v["small"])?;
    let i = map_from_json(&small, big, &v["i"])?;
    let p = map_from_json(big, &small, &v["p"])?;
    let h = map_from_json(big, big, &v["h"])?;
    let small_d: Vec<Vector> = i.iter().map(|x| x.apply(&big_d).apply(|k| p[k.idx].clone())).collect();
    let c = Contraction {
        small_basis: small.syms().collect(),
        small_diff: lin_map(small_d),
        i: lin_map(i),
        p: lin_map(p),
        h: lin_map(h),
    };
    Ok((small, c))
}

pub fn contraction_to_json(big: &GradedSpace, small: &GradedSpace, c: &Contraction<Sym, Sym>) -> Value {
    let table = |source: &GradedSpace, target: &GradedSpace, f: &dyn Fn(&Sym) -> Vector| -> Value {
        Value::Object(
            source
                .syms()
                .map(|s| (s, f(&s)))
                .filter(|(_, v)| !v.is_zero())
                .map(|(s, v)| (source.id(s.idx).to_string(), vector_json(target, &v)))
                .collect(),
        )
    };
    json!({
        "small": small,
        "i": table(small, big, &*c.i),
        "p": table(big, small, &*c.p),
        "h": table(big, big, &*c.h),
    })
}

/// Multilinear operators on a weighted carrier: for ODEs `power` is the
/// exponent of `t`, for fixed-point equations `shift` is the filtration
/// raise.
pub struct OpTables {
    pub space: GradedSpace,
    pub v0: Vector,
    pub ops: Vec<OpTable>,
}

pub struct OpTable {
    pub arity: usize,
    pub power: u32,
    pub shift: u32,
    pub table: BTreeMap<Vec<Sym>, Vector>,
}

impl OpTables {
    pub fn from_json(v: &Value) -> anyhow::Result<Self> {
        let space = carrier_from_json(&v["carrier"])?;
        let v0 = vector_from_json(&space, &v["v0"])?;
        let mut ops = Vec::new();
        for op in v["ops"].as_array().ok_or_else(|| anyhow!("ops must be a list"))? {
            let arity = op["arity"].as_u64().ok_or_else(|| anyhow!("op without arity"))? as usize;
            let mut table = BTreeMap::new();
            for entry in op["table"].as_array().cloned().unwrap_or_default() {
                let inputs: Vec<Sym> = entry["inputs"]
                    .as_array()
                    .ok_or_else(|| anyhow!("table entry without inputs"))?
                    .iter()
                    .map(|id| {
                        let id = id.as_str().ok_or_else(|| anyhow!("ids are strings"))?;
                        space.index_of(id).map(|i| space.sym(i)).ok_or_else(|| anyhow!("unknown id {id}"))
                    })
                    .collect::<anyhow::Result<_>>()?;
                if inputs.len() != arity {
                    bail!("table entry of length {} in an operator of arity {arity}", inputs.len());
                }
                table.insert(inputs, vector_from_json(&space, &entry["output"])?);
            }
            ops.push(OpTable {
                arity,
                power: op["power"].as_u64().unwrap_or(0) as u32,
                shift: op["shift"].as_u64().unwrap_or(1) as u32,
                table,
            });
        }
        Ok(OpTables { space, v0, ops })
    }

    pub fn to_json(&self) -> Value {
        let ops: Vec<Value> = self
            .ops
            .iter()
            .map(|op| {
                let table: Vec<Value> = op
                    .table
                    .iter()
                    .map(|(ks, out)| {
                        let ids: Vec<&str> = ks.iter().map(|k| self.space.id(k.idx)).collect();
                        json!({"inputs": ids, "output": vector_json(&self.space, out)})
                    })
                    .collect();
                json!({"arity": op.arity, "power": op.power, "shift": op.shift, "table": table})
            })
            .collect();
        json!({"carrier": self.space, "v0": vector_json(&self.space, &self.v0), "ops": ops})
    }

    pub fn from_fixture(fx: &OdeFixture) -> anyhow::Result<Self> {
        let space = GradedSpace::new(fx.basis.iter().map(|b| (format!("e{}", b.idx), 0, b.wt)))?;
        let ops = fx
            .tables
            .iter()
            .map(|(arity, power, table)| OpTable {
                arity: *arity,
                power: *power,
                shift: 1,
                table: table.iter().map(|(ks, out)| (ks.iter().map(|&i| space.sym(i)).collect(), out.clone())).collect(),
            })
            .collect();
        Ok(OpTables { space, v0: fx.v0.clone(), ops })
    }

    pub fn ode(&self, degree_cap: usize) -> FODE<'_, Sym> {
        let ops = self
            .ops
            .iter()
            .map(|op| OdeOp {
                arity: op.arity,
                power: op.power,
                f: op_from_table(move |ks: &[Sym]| op.table.get(ks).cloned().unwrap_or_default()),
            })
            .collect();
        FODE { ops, v0: self.v0.clone(), degree_cap }
    }

    /// `x = v_0 + Σ f(x, …, x)`; constant operators are folded into `v_0`.
    pub fn fixed_point(&self, cap: u32) -> anyhow::Result<FPEq<'_, Sym>> {
        let mut p0 = self.v0.clone();
        let mut ops: Vec<(u32, hoalg::solvers::Op<'_, Sym>)> = Vec::new();
        for op in &self.ops {
            if op.arity == 0 {
                p0 += &op.table.get(&Vec::new()).cloned().unwrap_or_default();
                continue;
            }
            let f = move |x: &Vector| {
                let args = vec![x; op.arity];
                multilinear(&args, |ks| op.table.get(ks).cloned().unwrap_or_default())
            };
            ops.push((op.shift, Box::new(f)));
        }
        Ok(FPEq { p0, ops, cap, weight: Box::new(|k: &Sym| k.wt) })
    }
}

pub fn vector_list_json(space: &GradedSpace, vs: &[Vector]) -> Value {
    Value::Array(vs.iter().map(|v| vector_json(space, v)).collect())
}
