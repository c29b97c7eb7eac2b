from timeout_decorator import timeout
from timeout_decorator.timeout_decorator import TimeoutError


def set_timeout(fct, timeout_time):
    """Wrap a solver call with a wall-clock cap in seconds; 0 or None means no cap."""
    if not timeout_time:
        return fct
    return timeout(timeout_time)(fct)
