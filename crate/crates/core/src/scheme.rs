//! Investment vectors, relative share vectors and payouts.
//!
//! A scheme has `n` participants and one administrator; every vector here
//! has length `n + 1` with the administrator in the last slot.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on `sum(shares) == 1`.
pub const SHARE_SUM_TOL: f64 = 1e-12;
/// A participant share below this counts as zero for the exclusivity check.
pub const ZERO_SHARE_TOL: f64 = 1e-15;
/// Relative tolerance for full-allocation audits.
pub const ALLOCATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// The administrator invests and takes the whole fund when no
    /// participant claims.
    Active,
    /// The administrator invests nothing; when no participant claims, every
    /// participant is refunded.
    Passive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvestmentVector {
    amounts: Vec<f64>,
    mode: Mode,
}

impl InvestmentVector {
    pub fn new(amounts: Vec<f64>, mode: Mode) -> Result<Self> {
        if amounts.len() < 2 {
            return Err(Error::TooFewAgents(amounts.len()));
        }
        for (index, &value) in amounts.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if value < 0.0 {
                return Err(Error::NegativeInvestment { index, value });
            }
        }
        let n = amounts.len() - 1;
        if !amounts[..n].iter().any(|&v| v > 0.0) {
            return Err(Error::NoPositiveParticipant);
        }
        if mode == Mode::Passive && amounts[n] != 0.0 {
            return Err(Error::PassiveAdminInvestment(amounts[n]));
        }
        Ok(Self { amounts, mode })
    }

    pub fn active(amounts: Vec<f64>) -> Result<Self> {
        Self::new(amounts, Mode::Active)
    }

    /// Participants' amounts followed by a zero administrator slot.
    pub fn passive(participants: Vec<f64>) -> Result<Self> {
        let mut amounts = participants;
        amounts.push(0.0);
        Self::new(amounts, Mode::Passive)
    }

    pub fn amounts(&self) -> &[f64] {
        &self.amounts
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Number of participants, excluding the administrator.
    pub fn participants(&self) -> usize {
        self.amounts.len() - 1
    }

    pub fn participant_amounts(&self) -> &[f64] {
        &self.amounts[..self.participants()]
    }

    pub fn admin(&self) -> f64 {
        self.amounts[self.participants()]
    }

    pub fn total(&self) -> f64 {
        self.amounts.iter().sum()
    }

    pub fn participants_total(&self) -> f64 {
        self.participant_amounts().iter().sum()
    }

    /// Same participant amounts under a passive administrator.
    pub fn to_passive(&self) -> Self {
        let mut amounts = self.amounts.clone();
        let n = self.participants();
        amounts[n] = 0.0;
        Self {
            amounts,
            mode: Mode::Passive,
        }
    }

    pub fn into_amounts(self) -> Vec<f64> {
        self.amounts
    }
}

/// A realisation of the relative compensation vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelativeShareVector {
    shares: Vec<f64>,
}

impl RelativeShareVector {
    pub fn shares(&self) -> &[f64] {
        &self.shares
    }

    pub fn len(&self) -> usize {
        self.shares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shares.is_empty()
    }

    pub fn admin(&self) -> f64 {
        self.shares[self.shares.len() - 1]
    }

    /// Whether the administrator receives the whole fund in this outcome.
    pub fn admin_takes_all(&self) -> bool {
        self.admin() == 1.0
    }

    pub fn into_shares(self) -> Vec<f64> {
        self.shares
    }

    /// Skips validation. Callers must guarantee membership by construction.
    pub(crate) fn new_unchecked(shares: Vec<f64>) -> Self {
        debug_assert!(validate_shares(&shares).is_ok(), "{shares:?}");
        Self { shares }
    }
}

/// Checks that `shares` is a relative compensation vector: entries in
/// `[0, 1]`, summing to one, with the last entry equal to 1 exactly when all
/// participant entries vanish and 0 otherwise.
pub fn validate_shares(shares: &[f64]) -> Result<RelativeShareVector> {
    if shares.len() < 2 {
        return Err(Error::TooFewAgents(shares.len()));
    }
    for (index, &value) in shares.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { index });
        }
        if value < 0.0 {
            return Err(Error::NegativeShare { index, value });
        }
    }
    let n = shares.len() - 1;
    let admin = shares[n];
    let participants: f64 = shares[..n].iter().sum();
    let all_zero = shares[..n].iter().all(|&v| v < ZERO_SHARE_TOL);
    // With no participant share the administrator's share is forced to 1,
    // whatever the sum says.
    if all_zero && admin != 1.0 {
        return Err(Error::ExclusivityViolated {
            admin,
            participants,
        });
    }
    let sum = participants + admin;
    if (sum - 1.0).abs() > SHARE_SUM_TOL {
        return Err(Error::SumNotOne(sum));
    }
    if let Some((index, &value)) = shares.iter().enumerate().find(|(_, &v)| v > 1.0 + SHARE_SUM_TOL) {
        return Err(Error::ShareAboveOne { index, value });
    }
    if !all_zero && admin >= ZERO_SHARE_TOL {
        return Err(Error::ExclusivityViolated {
            admin,
            participants,
        });
    }
    Ok(RelativeShareVector {
        shares: shares.to_vec(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompensationVector {
    payouts: Vec<f64>,
    mode: Mode,
}

impl CompensationVector {
    pub fn payouts(&self) -> &[f64] {
        &self.payouts
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn admin(&self) -> f64 {
        self.payouts[self.payouts.len() - 1]
    }

    pub fn into_payouts(self) -> Vec<f64> {
        self.payouts
    }

    /// Full allocation against `inv`, at [`ALLOCATION_TOL`] relative.
    pub fn fully_allocated(&self, inv: &InvestmentVector) -> bool {
        let n = self.payouts.len() - 1;
        let (paid, funded) = match self.mode {
            Mode::Active => (self.payouts.iter().sum::<f64>(), inv.total()),
            Mode::Passive => {
                if self.payouts[n] != 0.0 {
                    return false;
                }
                (self.payouts[..n].iter().sum::<f64>(), inv.participants_total())
            }
        };
        (paid - funded).abs() <= ALLOCATION_TOL * funded.abs().max(f64::MIN_POSITIVE)
    }

    /// Administrator payout and participant payouts are never both positive.
    pub fn mutually_exclusive(&self) -> bool {
        let n = self.payouts.len() - 1;
        let admin_positive = self.payouts[n] > 0.0;
        let any_participant = self.payouts[..n].iter().any(|&w| w > 0.0);
        !(admin_positive && any_participant)
    }
}

fn check_dims(inv: &InvestmentVector, p: &RelativeShareVector) -> Result<()> {
    if inv.amounts.len() != p.shares.len() {
        return Err(Error::DimensionMismatch {
            expected: inv.amounts.len(),
            found: p.shares.len(),
        });
    }
    Ok(())
}

/// `W_i = (sum of all investments) * P_i` for every agent.
pub fn payouts_active(inv: &InvestmentVector, p: &RelativeShareVector) -> Result<CompensationVector> {
    if inv.mode != Mode::Active {
        return Err(Error::ModeMismatch {
            expected: Mode::Active,
            found: inv.mode,
        });
    }
    check_dims(inv, p)?;
    let total = inv.total();
    Ok(CompensationVector {
        payouts: p.shares.iter().map(|&s| total * s).collect(),
        mode: Mode::Active,
    })
}

/// `W_i = (participants' total) * P_i + pi_i * P_{n+1}` for participants; the
/// administrator gets nothing.
pub fn payouts_passive(inv: &InvestmentVector, p: &RelativeShareVector) -> Result<CompensationVector> {
    if inv.mode != Mode::Passive {
        return Err(Error::ModeMismatch {
            expected: Mode::Passive,
            found: inv.mode,
        });
    }
    check_dims(inv, p)?;
    let n = inv.participants();
    let pool = inv.participants_total();
    let refund = p.admin();
    let mut payouts: Vec<f64> = inv.amounts[..n]
        .iter()
        .zip(&p.shares[..n])
        .map(|(&pi, &s)| pool * s + pi * refund)
        .collect();
    payouts.push(0.0);
    Ok(CompensationVector {
        payouts,
        mode: Mode::Passive,
    })
}

/// Dispatches on the scheme's mode.
pub fn payouts(inv: &InvestmentVector, p: &RelativeShareVector) -> Result<CompensationVector> {
    match inv.mode {
        Mode::Active => payouts_active(inv, p),
        Mode::Passive => payouts_passive(inv, p),
    }
}

pub fn scale_investments(inv: &InvestmentVector, c: f64) -> Result<InvestmentVector> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::NonPositiveScale(c));
    }
    InvestmentVector::new(inv.amounts.iter().map(|&a| a * c).collect(), inv.mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn shares(v: &[f64]) -> RelativeShareVector {
        validate_shares(v).unwrap()
    }

    #[test]
    fn validate_accepts_admin_branch_and_participant_split() {
        assert!(validate_shares(&[0.0, 0.0, 1.0]).is_ok());
        assert!(validate_shares(&[0.4, 0.6, 0.0]).is_ok());
    }

    #[test]
    fn validate_rejects_bad_vectors() {
        assert!(matches!(validate_shares(&[0.5, 0.5, 0.5]), Err(Error::SumNotOne(s)) if (s - 1.5).abs() < 1e-15));
        assert!(matches!(validate_shares(&[-0.1, 1.1, 0.0]), Err(Error::NegativeShare { index: 0, .. })));
        assert!(matches!(validate_shares(&[0.5, 0.0, 0.5]), Err(Error::ExclusivityViolated { .. })));
        assert!(matches!(validate_shares(&[1.0]), Err(Error::TooFewAgents(1))));
        assert!(matches!(validate_shares(&[f64::NAN, 1.0]), Err(Error::NonFinite { index: 0 })));
    }

    #[test]
    fn investment_vector_invariants() {
        assert!(matches!(
            InvestmentVector::active(vec![0.0, 0.0, 1.0]),
            Err(Error::NoPositiveParticipant)
        ));
        assert!(matches!(
            InvestmentVector::new(vec![1.0, 1.0], Mode::Passive),
            Err(Error::PassiveAdminInvestment(_))
        ));
        assert!(matches!(
            InvestmentVector::active(vec![1.0, -1.0, 1.0]),
            Err(Error::NegativeInvestment { index: 1, .. })
        ));
        assert!(matches!(
            InvestmentVector::passive(vec![0.0, 0.0]),
            Err(Error::NoPositiveParticipant)
        ));
        let inv = InvestmentVector::passive(vec![1.0, 2.0]).unwrap();
        assert_eq!(inv.amounts(), &[1.0, 2.0, 0.0]);
        assert_eq!(inv.participants(), 2);
    }

    #[test]
    fn active_payout_examples() {
        let inv = InvestmentVector::active(vec![4.0, 4.0, 4.0]).unwrap();
        let w = payouts_active(&inv, &shares(&[0.0, 0.0, 1.0])).unwrap();
        assert_eq!(w.payouts(), &[0.0, 0.0, 12.0]);

        let inv = InvestmentVector::active(vec![1.0, 2.0, 1.0]).unwrap();
        let w = payouts_active(&inv, &shares(&[0.25, 0.75, 0.0])).unwrap();
        assert_eq!(w.payouts(), &[1.0, 3.0, 0.0]);

        let inv = InvestmentVector::active(vec![11.0, 3.0, 10.0]).unwrap();
        let w = payouts_active(&inv, &shares(&[0.5, 0.5, 0.0])).unwrap();
        assert_eq!(w.payouts(), &[12.0, 12.0, 0.0]);
    }

    #[test]
    fn passive_payout_examples() {
        let inv = InvestmentVector::passive(vec![1.0, 1.0]).unwrap();
        let w = payouts_passive(&inv, &shares(&[0.0, 0.0, 1.0])).unwrap();
        assert_eq!(w.payouts(), &[1.0, 1.0, 0.0]);
        let w = payouts_passive(&inv, &shares(&[0.5, 0.5, 0.0])).unwrap();
        assert_eq!(w.payouts(), &[1.0, 1.0, 0.0]);

        let inv = InvestmentVector::passive(vec![3.0, 1.0]).unwrap();
        let w = payouts_passive(&inv, &shares(&[1.0, 0.0, 0.0])).unwrap();
        assert_eq!(w.payouts(), &[4.0, 0.0, 0.0]);
    }

    #[test]
    fn payout_errors() {
        let active = InvestmentVector::active(vec![1.0, 1.0, 1.0]).unwrap();
        let passive = InvestmentVector::passive(vec![1.0, 1.0]).unwrap();
        let p3 = shares(&[0.5, 0.5, 0.0]);
        let p2 = shares(&[1.0, 0.0]);
        assert!(matches!(payouts_active(&passive, &p3), Err(Error::ModeMismatch { .. })));
        assert!(matches!(payouts_passive(&active, &p3), Err(Error::ModeMismatch { .. })));
        assert!(matches!(
            payouts_active(&active, &p2),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn scaling_examples() {
        let inv = InvestmentVector::active(vec![1.0, 2.0, 1.0]).unwrap();
        assert_eq!(scale_investments(&inv, 1.0).unwrap().amounts(), &[1.0, 2.0, 1.0]);
        assert_eq!(scale_investments(&inv, 3.0).unwrap().amounts(), &[3.0, 6.0, 3.0]);
        let inv = InvestmentVector::active(vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(scale_investments(&inv, 0.5).unwrap().amounts(), &[0.0, 0.5, 0.0]);
        assert!(matches!(scale_investments(&inv, 0.0), Err(Error::NonPositiveScale(_))));
        assert!(matches!(scale_investments(&inv, -2.0), Err(Error::NonPositiveScale(_))));
    }

    /// Random member of R_{n+1}: either the admin branch or a normalised
    /// positive participant split.
    fn share_vector() -> impl Strategy<Value = Vec<f64>> {
        (1usize..8).prop_flat_map(|n| {
            prop_oneof![
                1 => Just({
                    let mut v = vec![0.0; n];
                    v.push(1.0);
                    v
                }),
                4 => prop::collection::vec(prop_oneof![Just(0.0), 0.0..10.0f64], n)
                    .prop_filter("some participant claims", |w| w.iter().any(|&x| x > 0.0))
                    .prop_map(|w| {
                        let s: f64 = w.iter().sum();
                        let mut v: Vec<f64> = w.iter().map(|x| x / s).collect();
                        v.push(0.0);
                        v
                    }),
            ]
        })
    }

    proptest! {
        #[test]
        fn full_allocation_and_exclusivity(
            raw in share_vector(),
            seed in prop::collection::vec(0.0..100.0f64, 9),
            admin in 0.0..50.0f64,
            c in 0.01..100.0f64,
        ) {
            let p = validate_shares(&raw).unwrap();
            let n = raw.len() - 1;
            let mut amounts: Vec<f64> = seed[..n].to_vec();
            amounts[0] += 1.0;

            let passive = InvestmentVector::passive(amounts.clone()).unwrap();
            let wp = payouts_passive(&passive, &p).unwrap();
            prop_assert!(wp.fully_allocated(&passive));
            prop_assert!(wp.mutually_exclusive());

            amounts.push(admin);
            let active = InvestmentVector::active(amounts).unwrap();
            let wa = payouts_active(&active, &p).unwrap();
            prop_assert!(wa.fully_allocated(&active));
            prop_assert!(wa.mutually_exclusive());

            let scaled = payouts_active(&scale_investments(&active, c).unwrap(), &p).unwrap();
            for (s, w) in scaled.payouts().iter().zip(wa.payouts()) {
                prop_assert!((s - c * w).abs() <= 1e-12 * (c * w).abs().max(1.0));
            }
        }
    }
}
