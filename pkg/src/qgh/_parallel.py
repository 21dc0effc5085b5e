import os
from concurrent.futures import ThreadPoolExecutor


def threads() -> int:
    """Worker count from ``QGH_THREADS`` (default: all cores)."""
    raw = os.environ.get("QGH_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


def pmap(fn, items):
    """Order-preserving map; threads only help where numpy releases the GIL."""
    items = list(items)
    n = threads()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))
