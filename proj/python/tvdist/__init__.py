try:
    from ._tvdist import (
        BayesNet,
        BudgetError,
        InputError,
        decompose_width,
        estimate_tv,
        estimate_tv_uniform,
        exact_tv,
        gen_random_net,
        infer,
        parse_net,
        sample_count,
        serialize_net,
        validate,
    )
except ImportError:  # uninstalled builds keep _tvdist next to the package
    from _tvdist import (
        BayesNet,
        BudgetError,
        InputError,
        decompose_width,
        estimate_tv,
        estimate_tv_uniform,
        exact_tv,
        gen_random_net,
        infer,
        parse_net,
        sample_count,
        serialize_net,
        validate,
    )

__all__ = [
    "BayesNet",
    "BudgetError",
    "InputError",
    "decompose_width",
    "estimate_tv",
    "estimate_tv_uniform",
    "exact_tv",
    "gen_random_net",
    "infer",
    "load_net",
    "parse_net",
    "sample_count",
    "serialize_net",
    "validate",
]


def load_net(path):
    with open(path, "r", encoding="utf-8") as f:
        return parse_net(f.read())
