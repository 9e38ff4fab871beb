"""Network checkpoints: ParamStore (plus optional extra arrays) in a container."""

from socialgf.container import read_container, write_container
from socialgf.errors import ArtifactError
from socialgf.numerics.net import MLPSpec, ParamStore


def store_meta(store):
    return {
        "widths": list(store.spec.widths),
        "activation": store.spec.activation,
        "out_activation": store.spec.out_activation,
    }


def store_arrays(store, prefix=""):
    return {prefix + name: arr for name, arr in store.params.items()}


def store_from(meta, arrays, prefix=""):
    spec = MLPSpec(tuple(meta["widths"]), meta["activation"], meta["out_activation"])
    n = len(meta["widths"]) - 1
    params = {}
    for i in range(n):
        for part in (f"w{i}", f"b{i}"):
            key = prefix + part
            if key not in arrays:
                raise ArtifactError(f"checkpoint is missing parameter {key!r}")
            params[part] = arrays[key]
    return ParamStore(spec, params)


def save_params(path, store, extra_meta=None):
    meta = {"kind": "params", "net": store_meta(store)}
    if extra_meta:
        meta.update(extra_meta)
    write_container(path, meta, store_arrays(store))


def load_params(path):
    meta, arrays, _ = read_container(path)
    if meta.get("kind") != "params":
        raise ArtifactError(f"{path} is not a parameter checkpoint")
    return store_from(meta["net"], arrays), meta
