/// The first success and the errors of the attempts before it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetrySuccess<T, E> {
    pub value: T,
    pub attempts: usize,
    pub errors: Vec<E>,
}

/// Every attempt failed; one error per attempt, in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetryFailure<E> {
    pub errors: Vec<E>,
}

impl<E> RetryFailure<E> {
    pub fn attempts(&self) -> usize {
        self.errors.len()
    }
}

/// Runs `runner` on `input`; after each failure `repair` turns the input
/// and the error into a revised input. At most `max_attempts` runs, and at
/// least one.
pub fn retry_with_feedback<I, T, E>(
    input: I,
    mut runner: impl FnMut(&I) -> Result<T, E>,
    mut repair: impl FnMut(&I, &E) -> I,
    max_attempts: usize,
) -> Result<RetrySuccess<T, E>, RetryFailure<E>> {
    let mut current = input;
    let mut errors = Vec::new();
    for attempt in 1..=max_attempts.max(1) {
        match runner(&current) {
            Ok(value) => {
                return Ok(RetrySuccess {
                    value,
                    attempts: attempt,
                    errors,
                })
            }
            Err(e) => {
                if attempt < max_attempts {
                    current = repair(&current, &e);
                }
                errors.push(e);
            }
        }
    }
    Err(RetryFailure { errors })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_and_identity() {
        let ok = retry_with_feedback(1, |x| Ok::<_, String>(*x), |x, _| *x, 3).unwrap();
        assert_eq!((ok.value, ok.attempts), (1, 1));
        let mut runs = 0;
        let fail = retry_with_feedback(
            0,
            |_| {
                runs += 1;
                Err::<(), _>(format!("run {runs}"))
            },
            |x, _| x + 1,
            3,
        )
        .unwrap_err();
        assert_eq!(fail.attempts(), 3);
        assert_eq!(fail.errors, ["run 1", "run 2", "run 3"]);
    }

    #[test]
    fn repair_feeds_the_next_attempt() {
        let out = retry_with_feedback(
            "((".to_string(),
            |s| if s.len() >= 4 { Ok(s.clone()) } else { Err(s.len()) },
            |s, _| format!("{s})"),
            3,
        )
        .unwrap();
        assert_eq!((out.value.as_str(), out.attempts, out.errors), ("(())", 3, vec![2, 3]));
    }
}
