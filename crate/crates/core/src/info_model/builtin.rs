use super::{InfoModel, OracleKind, ValueLaw};
use crate::error::{Error, Result};
use crate::numerics::RandomStream;

/// The shipped information structures. All of them draw signals iid
/// uniform on `[0, 1]`, so they are exchangeable by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind {
    /// Two buyers; `X₁ | y` is Bernoulli with success probability `(2y₁ + y₂)/3`.
    Example1,
    /// Two buyers; `X₁ | y` is uniform on `[0, y₁ + y₂]`.
    Example2Pa,
    /// `N` buyers sharing the value `(Y₁ + … + Y_N)/N`.
    CommonValueAvg { n: usize },
    /// `N` buyers with `X_n | y_n` uniform on `[0, 2yₙ]`, independent across buyers.
    PrivateValues { n: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuiltinModel {
    kind: ModelKind,
    oracle: OracleKind,
    name: String,
}

impl BuiltinModel {
    pub fn new(kind: ModelKind) -> Result<Self> {
        let name = match kind {
            ModelKind::Example1 => "example1".to_string(),
            ModelKind::Example2Pa => "example2_pa".to_string(),
            ModelKind::CommonValueAvg { n } | ModelKind::PrivateValues { n } if n < 2 => {
                return Err(Error::InvalidParameter(format!(
                    "model needs at least two buyers, got {n}"
                )))
            }
            ModelKind::CommonValueAvg { n } => format!("common_value_avg({n})"),
            ModelKind::PrivateValues { n } => format!("private_values({n})"),
        };
        Ok(Self {
            kind,
            oracle: OracleKind::ClosedForm,
            name,
        })
    }

    pub fn example1() -> Self {
        Self::new(ModelKind::Example1).expect("valid")
    }

    pub fn example2_pa() -> Self {
        Self::new(ModelKind::Example2Pa).expect("valid")
    }

    pub fn common_value_avg(n: usize) -> Result<Self> {
        Self::new(ModelKind::CommonValueAvg { n })
    }

    pub fn private_values(n: usize) -> Result<Self> {
        Self::new(ModelKind::PrivateValues { n })
    }

    /// Resolves a configuration name such as `example1` or
    /// `common_value_avg` (with `n` taken from `buyers`).
    pub fn by_name(name: &str, buyers: Option<usize>) -> Result<Self> {
        match name {
            "example1" => Ok(Self::example1()),
            "example2_pa" => Ok(Self::example2_pa()),
            "common_value_avg" => Self::common_value_avg(buyers.unwrap_or(3)),
            "private_values" => Self::private_values(buyers.unwrap_or(2)),
            other => Err(Error::InvalidParameter(format!("unknown model `{other}`"))),
        }
    }

    /// Switches the pair oracle to nested sampling.
    pub fn with_oracle(mut self, oracle: OracleKind) -> Self {
        self.oracle = oracle;
        self
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }
}

impl InfoModel for BuiltinModel {
    fn name(&self) -> &str {
        &self.name
    }

    fn n_buyers(&self) -> usize {
        match self.kind {
            ModelKind::Example1 | ModelKind::Example2Pa => 2,
            ModelKind::CommonValueAvg { n } | ModelKind::PrivateValues { n } => n,
        }
    }

    fn signal_interval(&self) -> (f64, f64) {
        (0.0, 1.0)
    }

    fn value_interval(&self) -> (f64, f64) {
        match self.kind {
            ModelKind::Example1 | ModelKind::CommonValueAvg { .. } => (0.0, 1.0),
            ModelKind::Example2Pa | ModelKind::PrivateValues { .. } => (0.0, 2.0),
        }
    }

    fn sample_signals_into(&self, stream: &mut RandomStream, out: &mut [f64]) {
        for y in out.iter_mut() {
            *y = stream.uniform();
        }
    }

    fn value_law(&self, profile: &[f64]) -> ValueLaw {
        match self.kind {
            ModelKind::Example1 => ValueLaw::bernoulli((2.0 * profile[0] + profile[1]) / 3.0),
            ModelKind::Example2Pa => ValueLaw::uniform(0.0, profile[0] + profile[1]),
            ModelKind::CommonValueAvg { .. } => {
                ValueLaw::Point(profile.iter().sum::<f64>() / profile.len() as f64)
            }
            ModelKind::PrivateValues { .. } => ValueLaw::uniform(0.0, 2.0 * profile[0]),
        }
    }

    fn pair_law_closed(&self, y1: f64, z1: f64) -> Option<ValueLaw> {
        match self.kind {
            ModelKind::Example1 | ModelKind::Example2Pa => Some(self.value_law(&[y1, z1])),
            ModelKind::CommonValueAvg { n } => {
                // one opponent at z₁, the other n−2 iid uniform on [0, z₁]
                let nf = n as f64;
                Some(ValueLaw::ScaledIrwinHall {
                    offset: (y1 + z1) / nf,
                    scale: z1 / nf,
                    terms: (n - 2) as u32,
                })
            }
            ModelKind::PrivateValues { .. } => Some(ValueLaw::uniform(0.0, 2.0 * y1)),
        }
    }

    fn sample_opponents_given_top(
        &self,
        _y1: f64,
        z1: f64,
        stream: &mut RandomStream,
        out: &mut [f64],
    ) -> bool {
        if let Some((first, rest)) = out.split_first_mut() {
            *first = z1;
            for z in rest {
                *z = z1 * stream.uniform();
            }
        }
        true
    }

    fn oracle_kind(&self) -> OracleKind {
        self.oracle
    }
}
