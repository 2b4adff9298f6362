use std::fmt;

use serde::{Deserialize, Serialize};

use crate::oracle::{OracleAnswer, OracleResult};
use crate::zh::{Answer, ZhResult};

/// How the Z-H answer relates to the exact answer for one instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerdictKind {
    AgreeYes,
    AgreeNo,
    /// Z-H said NO although a simple path exists. Always an implementation bug.
    BugNecessity,
    /// Z-H said YES although no simple path exists.
    CandidateCounterexample,
    /// The oracle ran out of budget.
    Unknown,
}

impl VerdictKind {
    pub const ALL: [VerdictKind; 5] = [
        VerdictKind::AgreeYes,
        VerdictKind::AgreeNo,
        VerdictKind::BugNecessity,
        VerdictKind::CandidateCounterexample,
        VerdictKind::Unknown,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            VerdictKind::AgreeYes => "AGREE_YES",
            VerdictKind::AgreeNo => "AGREE_NO",
            VerdictKind::BugNecessity => "BUG_NECESSITY",
            VerdictKind::CandidateCounterexample => "CANDIDATE_COUNTEREXAMPLE",
            VerdictKind::Unknown => "UNKNOWN",
        }
    }

    pub fn is_agreement(self) -> bool {
        matches!(self, VerdictKind::AgreeYes | VerdictKind::AgreeNo)
    }
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub zh: Answer,
    pub oracle: OracleAnswer,
}

pub fn classify_answers(zh: Answer, oracle: OracleAnswer) -> Verdict {
    let kind = match (zh, oracle) {
        (_, OracleAnswer::Timeout) => VerdictKind::Unknown,
        (Answer::Yes, OracleAnswer::Yes) => VerdictKind::AgreeYes,
        (Answer::No, OracleAnswer::No) => VerdictKind::AgreeNo,
        (Answer::No, OracleAnswer::Yes) => VerdictKind::BugNecessity,
        (Answer::Yes, OracleAnswer::No) => VerdictKind::CandidateCounterexample,
    };
    Verdict { kind, zh, oracle }
}

pub fn classify<W>(zh: &ZhResult, orc: &OracleResult<W>) -> Verdict {
    classify_answers(zh.answer, orc.answer)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table() {
        use Answer::*;
        let k = |z, o| classify_answers(z, o).kind;
        assert_eq!(k(Yes, OracleAnswer::Yes), VerdictKind::AgreeYes);
        assert_eq!(k(No, OracleAnswer::No), VerdictKind::AgreeNo);
        assert_eq!(k(No, OracleAnswer::Yes), VerdictKind::BugNecessity);
        assert_eq!(k(Yes, OracleAnswer::No), VerdictKind::CandidateCounterexample);
        assert_eq!(k(Yes, OracleAnswer::Timeout), VerdictKind::Unknown);
        assert_eq!(k(No, OracleAnswer::Timeout), VerdictKind::Unknown);
    }
}
