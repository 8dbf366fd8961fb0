use std::fmt;

use crate::error::{Result, TmbError};

/// A variable (0-based) with a polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Self {
            var,
            positive: true,
        }
    }

    pub fn neg(var: usize) -> Self {
        Self {
            var,
            positive: false,
        }
    }

    /// DIMACS form: 1-based, negative for negated literals.
    pub fn to_dimacs(self) -> i64 {
        let v = self.var as i64 + 1;
        if self.positive {
            v
        } else {
            -v
        }
    }

    pub fn holds(self, assignment: &Assignment) -> bool {
        assignment.values[self.var] == self.positive
    }
}

/// Total truth assignment over variables `0..len`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    pub values: Vec<bool>,
}

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Self { values }
    }

    /// Parses a string of `0`/`1` characters, variable 1 first.
    pub fn from_bits(bits: &str) -> Result<Self> {
        bits.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(TmbError::Validation(format!(
                    "assignment bit `{other}` is not 0 or 1"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    pub fn to_bits(&self) -> String {
        self.values
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CnfFormula {
    variable_count: usize,
    clauses: Vec<Vec<Literal>>,
}

impl CnfFormula {
    /// Every literal must refer to a variable below `variable_count`.
    pub fn new(variable_count: usize, clauses: Vec<Vec<Literal>>) -> Result<Self> {
        for (j, c) in clauses.iter().enumerate() {
            if let Some(l) = c.iter().find(|l| l.var >= variable_count) {
                return Err(TmbError::Validation(format!(
                    "clause {j} mentions variable {} but the formula has {variable_count}",
                    l.var + 1
                )));
            }
        }
        Ok(Self {
            variable_count,
            clauses,
        })
    }

    /// Builds a formula from DIMACS-style signed literals.
    pub fn from_dimacs(variable_count: usize, clauses: &[&[i64]]) -> Result<Self> {
        let cl = clauses
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&x| {
                        if x == 0 {
                            Err(TmbError::Validation("literal 0 is not allowed".into()))
                        } else {
                            Ok(Literal {
                                var: (x.unsigned_abs() - 1) as usize,
                                positive: x > 0,
                            })
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(variable_count, cl)
    }

    pub fn variable_count(&self) -> usize {
        self.variable_count
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    pub fn check_assignment(&self, assignment: &Assignment) -> Result<()> {
        if assignment.len() != self.variable_count {
            return Err(TmbError::AssignmentSize {
                expected: self.variable_count,
                got: assignment.len(),
            });
        }
        match self.first_unsatisfied(assignment) {
            Some(j) => Err(TmbError::UnsatisfiedClause(j)),
            None => Ok(()),
        }
    }

    /// Index of the first clause with no true literal.
    pub fn first_unsatisfied(&self, assignment: &Assignment) -> Option<usize> {
        self.clauses
            .iter()
            .position(|c| !c.iter().any(|l| l.holds(assignment)))
    }

    pub fn is_satisfied_by(&self, assignment: &Assignment) -> bool {
        assignment.len() == self.variable_count && self.first_unsatisfied(assignment).is_none()
    }

    /// Exhaustive search; the first satisfying assignment in binary counting
    /// order (variable 1 most significant, false before true).
    pub fn solve_exhaustive(&self) -> Option<Assignment> {
        let p = self.variable_count;
        assert!(p < 32, "exhaustive search limited to 31 variables");
        (0u64..1 << p)
            .map(|mask| Assignment::new((0..p).map(|i| mask >> (p - 1 - i) & 1 == 1).collect()))
            .find(|a| self.first_unsatisfied(a).is_none())
    }

    /// Every clause has exactly three literals and none holds a variable
    /// together with its negation.
    pub fn check_three_sat(&self) -> Result<()> {
        for (j, c) in self.clauses.iter().enumerate() {
            if c.len() != 3 {
                return Err(TmbError::NotThreeSat(j));
            }
            if c.iter().any(|l| {
                c.contains(&Literal {
                    var: l.var,
                    positive: !l.positive,
                })
            }) {
                return Err(TmbError::ContradictoryClause(j));
            }
        }
        Ok(())
    }

    /// DIMACS CNF text.
    pub fn to_dimacs_string(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.variable_count, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                s.push_str(&l.to_dimacs().to_string());
                s.push(' ');
            }
            s.push_str("0\n");
        }
        s
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .clauses
            .iter()
            .map(|c| {
                let lits: Vec<String> = c
                    .iter()
                    .map(|l| format!("{}x{}", if l.positive { "" } else { "!" }, l.var + 1))
                    .collect();
                format!("({})", lits.join(" | "))
            })
            .collect();
        f.write_str(&parts.join(" & "))
    }
}
