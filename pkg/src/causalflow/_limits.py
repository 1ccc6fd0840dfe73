import os

from .errors import LimitExceededError

ENV_VAR = "CAUSALFLOW_LIMIT"


def effective_limit(default):
    """Return the enumeration guard, honouring ``$CAUSALFLOW_LIMIT``."""
    raw = os.environ.get(ENV_VAR)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise LimitExceededError(f"{ENV_VAR} must be an integer, got {raw!r}") from None


def check_limit(size, default, what, hint=""):
    limit = effective_limit(default)
    if size > limit:
        msg = f"{what} is {size}, above the limit of {limit} (set {ENV_VAR} to override)"
        if hint:
            msg += f"; {hint}"
        raise LimitExceededError(msg)
