"""Exception types shared across the package."""


class CapacityError(RuntimeError):
    """An exact computation would exceed its configured budget.

    Raised by exhaustive enumeration and exact convolution when the work
    implied by the inputs is larger than the caller allowed. The caller can
    either raise the budget or fall back to Monte Carlo estimation.
    """


class ScheduleFailure(RuntimeError):
    """The randomized scheduler exhausted its candidate subsets.

    This is the detectable failure event of a single solver attempt: every
    iteration draws a bounded number of candidate job subsets, and if none of
    them passes the per-dimension load checks the attempt aborts. Callers may
    simply retry with a fresh random stream.
    """
