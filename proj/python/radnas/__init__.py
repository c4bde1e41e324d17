"""Monte-Carlo architecture search with training-free scoring."""

import json as _json

try:
    from ._radnas import (  # wheel layout
        __version__,
        count_params,
        evaluate_detection,
        generate_sample,
        make_batch,
        pd_proxy,
        pfa_proxy,
        random_architecture,
        score_architecture,
    )
    from ._radnas import run_search as _run_search
except ImportError:  # build-tree layout: extension module on sys.path
    from _radnas import (
        __version__,
        count_params,
        evaluate_detection,
        generate_sample,
        make_batch,
        pd_proxy,
        pfa_proxy,
        random_architecture,
        score_architecture,
    )
    from _radnas import run_search as _run_search


def run_search(algorithm="uct", **config):
    """Run one architecture search and return the result as a dict.

    Keyword arguments mirror the CLI flags / JSON config schema, e.g.
    run_search("nmcs", budget=60, seed=7, input_size=16, batch_size=8,
    macro={"R": 2, "base_channels": 8}, alpha=30000).
    """
    config["algorithm"] = algorithm
    return _json.loads(_run_search(_json.dumps(config)))


__all__ = [
    "__version__",
    "count_params",
    "evaluate_detection",
    "generate_sample",
    "make_batch",
    "pd_proxy",
    "pfa_proxy",
    "random_architecture",
    "run_search",
    "score_architecture",
]
