use std::fmt;

use serde::{Deserialize, Serialize};

/// Outcome of a single check or a whole chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub desc: String,
    pub verdict: Verdict,
    pub witness: String,
}

/// Record of an inequality chain. The overall verdict is derived from the
/// steps and cannot disagree with them; deserialization recomputes it and
/// rejects documents where it does not match.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CertificateWire", into = "CertificateWire")]
pub struct Certificate {
    name: String,
    steps: Vec<Step>,
}

#[derive(Serialize, Deserialize)]
struct CertificateWire {
    name: String,
    steps: Vec<Step>,
    verdict: Verdict,
}

impl TryFrom<CertificateWire> for Certificate {
    type Error = String;
    fn try_from(w: CertificateWire) -> Result<Self, String> {
        let cert = Certificate {
            name: w.name,
            steps: w.steps,
        };
        if cert.verdict() != w.verdict {
            return Err(format!(
                "certificate '{}' claims {} but its steps give {}",
                cert.name,
                w.verdict,
                cert.verdict()
            ));
        }
        Ok(cert)
    }
}

impl From<Certificate> for CertificateWire {
    fn from(c: Certificate) -> Self {
        let verdict = c.verdict();
        CertificateWire {
            name: c.name,
            steps: c.steps,
            verdict,
        }
    }
}

impl Certificate {
    pub fn new(name: impl Into<String>) -> Self {
        Certificate {
            name: name.into(),
            steps: Vec::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// Pass iff there is at least one step and every step passes.
    pub fn verdict(&self) -> Verdict {
        Verdict::from_bool(!self.steps.is_empty() && self.steps.iter().all(|s| s.verdict.is_pass()))
    }

    pub fn passed(&self) -> bool {
        self.verdict().is_pass()
    }

    pub fn first_failure(&self) -> Option<&Step> {
        self.steps.iter().find(|s| !s.verdict.is_pass())
    }

    pub fn push(&mut self, desc: impl Into<String>, ok: bool, witness: impl Into<String>) -> bool {
        self.steps.push(Step {
            desc: desc.into(),
            verdict: Verdict::from_bool(ok),
            witness: witness.into(),
        });
        ok
    }

    /// Appends the steps of `sub`, prefixing descriptions with `label`.
    pub fn absorb(&mut self, label: &str, sub: Certificate) -> bool {
        let ok = sub.passed();
        if sub.steps.is_empty() {
            self.push(
                format!("{label}: {}", sub.name),
                false,
                "empty sub-certificate",
            );
        }
        for s in sub.steps {
            self.steps.push(Step {
                desc: format!("{label}: {}", s.desc),
                ..s
            });
        }
        ok
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serialization")
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} [{}]", self.name, self.verdict())?;
        for s in &self.steps {
            writeln!(f, "  [{}] {} ({})", s.verdict, s.desc, s.witness)?;
        }
        Ok(())
    }
}
