use serde::{Deserialize, Serialize};

use crate::hermitian::{ComplexVector, HermitianMatrix, RankInfo, DEFAULT_EPS_RANK};

/// Which optimization problem produced a design.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    /// Minimize `Tr(W + Σ)`.
    PowerMin,
    /// Maximize the minimum harvested energy over the EHRs.
    MaxminEh,
}

impl ProblemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::PowerMin => "power-min",
            ProblemKind::MaxminEh => "maxmin-eh",
        }
    }

    pub fn sense(self) -> Sense {
        match self {
            ProblemKind::PowerMin => Sense::Min,
            ProblemKind::MaxminEh => Sense::Max,
        }
    }
}

/// CSI-error model a design is robust against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorModel {
    /// Norm-bounded errors, worst-case constraints.
    Bounded,
    /// Gaussian errors, outage constraints.
    Outage,
}

impl ErrorModel {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorModel::Bounded => "bounded",
            ErrorModel::Outage => "outage",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Min,
    Max,
}

impl Sense {
    /// True when `a` is strictly better than `b`.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Sense::Min => a < b,
            Sense::Max => a > b,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignStatus {
    Optimal,
    Infeasible,
    NumericalFailure,
}

impl DesignStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            DesignStatus::Optimal => "optimal",
            DesignStatus::Infeasible => "infeasible",
            DesignStatus::NumericalFailure => "numerical_failure",
        }
    }
}

/// How the beam vector `w` was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extraction {
    NotAttempted,
    /// Principal eigenvector of a rank-one `W`.
    Direct,
    /// Best Gaussian-randomization candidate; `W` was replaced by `p u u†`.
    Randomized,
    /// Randomization found no feasible candidate; `W` kept as solved.
    RankGtOne,
}

/// Output bundle of one robust design.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Design {
    pub problem: ProblemKind,
    pub model: ErrorModel,
    #[serde(rename = "W")]
    pub w_mat: HermitianMatrix,
    #[serde(rename = "Sigma")]
    pub sigma: HermitianMatrix,
    pub rho: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<ComplexVector>,
    /// β for the bounded model, z for the outage model.
    pub search_param: f64,
    /// Transmit power for power minimization, max-min EH for the EH problem.
    pub objective: f64,
    pub status: DesignStatus,
    pub extraction: Extraction,
    pub rank_w: usize,
    pub ratio_w: f64,
    pub rank_sigma: usize,
    pub ratio_sigma: f64,
}

impl Design {
    pub fn new(
        problem: ProblemKind,
        model: ErrorModel,
        w_mat: HermitianMatrix,
        sigma: HermitianMatrix,
        rho: f64,
        search_param: f64,
        objective: f64,
    ) -> Self {
        let mut d = Design {
            problem,
            model,
            w_mat,
            sigma,
            rho,
            w: None,
            search_param,
            objective,
            status: DesignStatus::Optimal,
            extraction: Extraction::NotAttempted,
            rank_w: 0,
            ratio_w: 0.0,
            rank_sigma: 0,
            ratio_sigma: 0.0,
        };
        d.refresh_ranks();
        d
    }

    /// Recomputes the rank diagnostics of `W` and `Σ`.
    pub fn refresh_ranks(&mut self) {
        let RankInfo { rank, ratio } = self.w_mat.numerical_rank(DEFAULT_EPS_RANK);
        self.rank_w = rank;
        self.ratio_w = ratio;
        let RankInfo { rank, ratio } = self.sigma.numerical_rank(DEFAULT_EPS_RANK);
        self.rank_sigma = rank;
        self.ratio_sigma = ratio;
    }

    pub fn transmit_power(&self) -> f64 {
        self.w_mat.trace() + self.sigma.trace()
    }

    pub fn n_t(&self) -> usize {
        self.w_mat.dim()
    }

    /// `W + Σ`.
    pub fn total_covariance(&self) -> HermitianMatrix {
        self.w_mat.add(&self.sigma).expect("W and Σ share a dimension")
    }
}
