//! Declarative net descriptions, buildable from config records or a compact
//! `name:key=value,...` string.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{
    embed_classical, linear_combination, make_delta_at, net_algebra, smooth_net, Alpha, AsymptoticScale, Classical,
    DomainBox, EpsWeight, GeneralizedNet, Mollifier, NetOp, Smooth,
};
use crate::error::{invalid, Error, Result};

fn zero() -> f64 {
    0.0
}

fn one_u32() -> u32 {
    1
}

/// One term `coef·net` of a sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SumTerm {
    pub coef: f64,
    pub net: NetSpec,
}

/// Recipe for a 1D net.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NetSpec {
    /// `δ^m` centred at `at`.
    Delta {
        #[serde(default = "one_u32")]
        m: u32,
        #[serde(default = "zero")]
        at: f64,
    },
    /// `δ^{(k)}(x − at)`.
    DeltaDerivative {
        k: usize,
        #[serde(default = "zero")]
        at: f64,
    },
    Heaviside {
        #[serde(default = "zero")]
        at: f64,
    },
    Kink {
        #[serde(default = "zero")]
        at: f64,
    },
    /// `[f]`, or `ι(f) = [f ∗ φ_ε]` when `embed` is set.
    Smooth {
        f: Smooth,
        #[serde(default)]
        embed: bool,
    },
    Piecewise {
        breaks: Vec<f64>,
        pieces: Vec<Smooth>,
    },
    Weighted {
        base: Box<NetSpec>,
        weight: EpsWeight,
    },
    Sum {
        terms: Vec<SumTerm>,
    },
    Product {
        factors: Vec<NetSpec>,
    },
    Power {
        base: Box<NetSpec>,
        p: u32,
    },
    Derivative {
        base: Box<NetSpec>,
        order: usize,
    },
    Restrict {
        base: Box<NetSpec>,
        lo: f64,
        hi: f64,
    },
    /// `a(r)(ε)·base`.
    ScaleBy {
        base: Box<NetSpec>,
        #[serde(default)]
        scale: AsymptoticScale,
        r: f64,
    },
}

impl NetSpec {
    /// Builds the net on the default domain `[-1, 1]`.
    pub fn build(&self, phi: &Mollifier) -> Result<GeneralizedNet> {
        self.build_on(phi, DomainBox::interval(-1.0, 1.0)?)
    }

    pub fn build_on(&self, phi: &Mollifier, domain: DomainBox) -> Result<GeneralizedNet> {
        match self {
            NetSpec::Delta { m, at } => make_delta_at(*m, *at, phi, domain),
            NetSpec::DeltaDerivative { k, at } => {
                embed_classical(&Classical::DeltaDerivative { k: *k, at: *at }, phi, domain)
            }
            NetSpec::Heaviside { at } => embed_classical(&Classical::Heaviside { at: *at }, phi, domain),
            NetSpec::Kink { at } => embed_classical(&Classical::Kink { at: *at }, phi, domain),
            NetSpec::Smooth { f, embed: true } => embed_classical(&Classical::Smooth { f: f.clone() }, phi, domain),
            NetSpec::Smooth { f, embed: false } => smooth_net(f.clone(), domain),
            NetSpec::Piecewise { breaks, pieces } => embed_classical(
                &Classical::Piecewise {
                    breaks: breaks.clone(),
                    pieces: pieces.clone(),
                },
                phi,
                domain,
            ),
            NetSpec::Weighted { base, weight } => unary(base, phi, domain, NetOp::Weight { weight: *weight }),
            NetSpec::Sum { terms } => {
                let built = terms
                    .iter()
                    .map(|t| Ok((t.coef, t.net.build_on(phi, domain)?)))
                    .collect::<Result<Vec<_>>>()?;
                linear_combination(&built)
            }
            NetSpec::Product { factors } => {
                let (first, rest) = factors.split_first().ok_or_else(|| invalid("empty product"))?;
                let mut acc = first.build_on(phi, domain)?;
                for f in rest {
                    acc = net_algebra(&NetOp::Mul, &[acc, f.build_on(phi, domain)?])?;
                }
                Ok(acc)
            }
            NetSpec::Power { base, p } => unary(base, phi, domain, NetOp::Pow { p: *p }),
            NetSpec::Derivative { base, order } => unary(
                base,
                phi,
                domain,
                NetOp::Derive {
                    alpha: Alpha::dx(*order),
                },
            ),
            NetSpec::ScaleBy { base, scale, r } => unary(base, phi, domain, NetOp::ScaleBy { scale: *scale, r: *r }),
            NetSpec::Restrict { base, lo, hi } => base.build_on(phi, domain)?.restrict(&DomainBox::interval(*lo, *hi)?),
        }
    }

    /// Singular points registered by the leaves.
    pub fn singular_points(&self) -> Vec<f64> {
        let mut out = match self {
            NetSpec::Delta { at, .. }
            | NetSpec::DeltaDerivative { at, .. }
            | NetSpec::Heaviside { at }
            | NetSpec::Kink { at } => vec![*at],
            NetSpec::Smooth { .. } => vec![],
            NetSpec::Piecewise { breaks, .. } => breaks.clone(),
            NetSpec::Weighted { base, .. }
            | NetSpec::Power { base, .. }
            | NetSpec::Derivative { base, .. }
            | NetSpec::Restrict { base, .. }
            | NetSpec::ScaleBy { base, .. } => base.singular_points(),
            NetSpec::Sum { terms } => terms.iter().flat_map(|t| t.net.singular_points()).collect(),
            NetSpec::Product { factors } => factors.iter().flat_map(NetSpec::singular_points).collect(),
        };
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}

fn unary(base: &NetSpec, phi: &Mollifier, domain: DomainBox, op: NetOp) -> Result<GeneralizedNet> {
    net_algebra(&op, &[base.build_on(phi, domain)?])
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| invalid(format!("cannot parse {key} = {v:?}")))
}

/// Compact form: `delta:m=2`, `delta_derivative:k=1,at=0.5`, `heaviside`, `kink:at=0.2`,
/// `const:value=1`, `sin:amp=1,freq=1,phase=0`, `gaussian:...`, `bump:...`.
/// Any leaf also accepts `embed=1` (smooth leaves), `pow=p`, `eps_pow=b` and `eps_log=k`,
/// the latter two giving the weight `ε^b·|ln ε|^k`.
impl FromStr for NetSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.trim().split_once(':').unwrap_or((s.trim(), ""));
        let mut kv = std::collections::BTreeMap::new();
        for part in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| invalid(format!("expected key=value in net spec, got {part:?}")))?;
            if kv.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(invalid(format!("duplicate key {k:?} in net spec")));
            }
        }
        let mut take = |key: &str| kv.remove(key);
        let num = |key: &str, v: Option<String>, default: f64| -> Result<f64> {
            v.map_or(Ok(default), |v| parse_num(key, &v))
        };
        let at = |v: Option<String>| num("at", v, 0.0);
        let leaf = match name {
            "delta" => NetSpec::Delta {
                m: take("m").map_or(Ok(1), |v| parse_num("m", &v))?,
                at: at(take("at"))?,
            },
            "delta_derivative" | "ddelta" => NetSpec::DeltaDerivative {
                k: take("k").map_or(Ok(0), |v| parse_num("k", &v))?,
                at: at(take("at"))?,
            },
            "heaviside" => NetSpec::Heaviside { at: at(take("at"))? },
            "kink" => NetSpec::Kink { at: at(take("at"))? },
            "const" | "sin" | "gaussian" | "bump" => {
                let f = match name {
                    "const" => Smooth::Const {
                        value: num("value", take("value"), 1.0)?,
                    },
                    "sin" => Smooth::Sin {
                        amp: num("amp", take("amp"), 1.0)?,
                        freq: num("freq", take("freq"), 1.0)?,
                        phase: num("phase", take("phase"), 0.0)?,
                    },
                    "gaussian" => Smooth::Gaussian {
                        amp: num("amp", take("amp"), 1.0)?,
                        center: num("center", take("center"), 0.0)?,
                        width: num("width", take("width"), 0.3)?,
                    },
                    _ => Smooth::Bump {
                        amp: num("amp", take("amp"), 1.0)?,
                        center: num("center", take("center"), 0.0)?,
                        halfwidth: num("halfwidth", take("halfwidth"), 0.5)?,
                    },
                };
                let embed = take("embed").map_or(Ok(0u8), |v| parse_num("embed", &v))? != 0;
                NetSpec::Smooth { f, embed }
            }
            other => {
                return Err(invalid(format!(
                    "unknown net {other:?}; expected delta, delta_derivative, heaviside, kink, const, sin, gaussian or bump"
                )))
            }
        };
        let p = take("pow").map(|v| parse_num::<u32>("pow", &v)).transpose()?;
        let b = take("eps_pow").map(|v| parse_num::<f64>("eps_pow", &v)).transpose()?;
        let k = take("eps_log").map(|v| parse_num::<f64>("eps_log", &v)).transpose()?;
        if let Some(key) = kv.keys().next() {
            return Err(invalid(format!("unknown key {key:?} for net {name:?}")));
        }
        let mut spec = leaf;
        if let Some(p) = p {
            spec = NetSpec::Power {
                base: Box::new(spec),
                p,
            };
        }
        let w = match (b, k) {
            (None, None) => None,
            (b, None) => Some(EpsWeight::Power { b: b.unwrap_or(0.0) }),
            (b, Some(k)) => Some(EpsWeight::PowerLog { b: b.unwrap_or(0.0), k }),
        };
        if let Some(weight) = w {
            spec = NetSpec::Weighted {
                base: Box::new(spec),
                weight,
            };
        }
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compact_forms() {
        assert_eq!("delta:m=2".parse::<NetSpec>().unwrap(), NetSpec::Delta { m: 2, at: 0.0 });
        assert_eq!("heaviside".parse::<NetSpec>().unwrap(), NetSpec::Heaviside { at: 0.0 });
        let w = "sin:phase=1,eps_pow=-1,eps_log=1".parse::<NetSpec>().unwrap();
        let NetSpec::Weighted { weight, .. } = w else { panic!("{w:?}") };
        assert_eq!(weight, EpsWeight::PowerLog { b: -1.0, k: 1.0 });
        assert!("delta:q=1".parse::<NetSpec>().is_err());
        assert!("delta:m".parse::<NetSpec>().is_err());
        assert!("cubic".parse::<NetSpec>().is_err());
        assert!("delta:m=1,m=2".parse::<NetSpec>().is_err());
    }

    #[test]
    fn json_records_build() {
        let s = r#"{"kind":"sum","terms":[{"coef":1.0,"net":{"kind":"delta","at":0.25}},
                   {"coef":-2.0,"net":{"kind":"power","base":{"kind":"kink","at":-0.5},"p":2}}]}"#;
        let spec: NetSpec = serde_json::from_str(s).unwrap();
        assert_eq!(spec.singular_points(), vec![-0.5, 0.25]);
        let u = spec.build(&Mollifier::standard()).unwrap();
        let d = make_delta_at(1, 0.25, &Mollifier::standard(), DomainBox::interval(-1.0, 1.0).unwrap()).unwrap();
        let eps = 1.0 / 64.0;
        let k = embed_classical(&Classical::Kink { at: -0.5 }, &Mollifier::standard(), *d.domain()).unwrap();
        for x in [-0.5, 0.0, 0.25 + 0.3 * eps] {
            let p = [x, 0.0];
            let want = d.eval(p, eps, Alpha::ZERO) - 2.0 * k.eval(p, eps, Alpha::ZERO).powi(2);
            assert!((u.eval(p, eps, Alpha::ZERO) - want).abs() <= 1e-12 * want.abs().max(1.0));
        }
        assert!(serde_json::from_str::<NetSpec>(r#"{"kind":"delta","n":2}"#).is_err());
    }
}
