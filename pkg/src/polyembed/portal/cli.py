"""Command-line entry point: ``polyembed <subcommand> [options]``.

Options may also come from ``--config file.json`` (keys are option names
with underscores); explicit flags win over the file.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from ..core import LangWord, ParallelCorpus, load_embeddings, save_embeddings
from ..ingest import (
    DEFAULT_TAU,
    extract_dictionary,
    read_dictionary,
    read_mono_corpus,
    read_parallel_corpus,
    train_model1,
    write_dictionary,
)
from ..sgns import SgnsParams

logger = logging.getLogger("polyembed")


class UsageError(Exception):
    pass


SGNS_DEFAULTS = dict(dim=512, window=5, epochs=10, negatives=5, min_count=5, lr=0.025, seed=0, threads=1,
                     subsample=0.0, noise_power=0.75)


def _corpus_spec(value: str):
    lang, sep, path = value.partition("=")
    if not sep or not lang or not path:
        raise argparse.ArgumentTypeError(f"expected LANG=PATH, got {value!r}")
    return lang, path


def _parallel_spec(value: str):
    parts = value.split(",")
    if len(parts) not in (3, 4) or "-" not in parts[0]:
        raise argparse.ArgumentTypeError(f"expected SRC-TGT,SRC_PATH,TGT_PATH[,ALIGN_PATH], got {value!r}")
    src, tgt = parts[0].split("-", 1)
    return src, tgt, parts[1], parts[2], parts[3] if len(parts) == 4 else None


def _csv_list(value: str) -> list[str]:
    return [v for v in value.split(",") if v]


def _add_sgns(p: argparse.ArgumentParser):
    g = p.add_argument_group("skipgram")
    g.add_argument("--dim", type=int)
    g.add_argument("--window", type=int)
    g.add_argument("--epochs", type=int)
    g.add_argument("--negatives", type=int)
    g.add_argument("--min-count", type=int)
    g.add_argument("--lr", type=float)
    g.add_argument("--subsample", type=float)
    g.add_argument("--noise-power", type=float)
    g.add_argument("--threads", type=int, help="1 = deterministic single-threaded training")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polyembed", description="Multilingual embedding estimation and evaluation.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def command(name, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("--config", type=Path, help="JSON file with default option values")
        p.add_argument("--seed", type=int)
        return p

    p = command("extract-dict", "extract a bilingual dictionary from a parallel corpus")
    p.add_argument("--parallel", type=_parallel_spec, required=True)
    p.add_argument("--tau", type=float)
    p.add_argument("--iterations", type=int)
    p.add_argument("--threads", type=int, help="E-step workers; output does not depend on it")
    p.add_argument("--out", type=Path, required=True)

    p = command("train-sgns", "monolingual skipgram embeddings")
    p.add_argument("--corpus", type=_corpus_spec, action="append", required=True)
    p.add_argument("--out", type=Path, required=True)
    _add_sgns(p)

    p = command("train-multicluster", "multiCluster embeddings")
    p.add_argument("--corpus", type=_corpus_spec, action="append", required=True)
    p.add_argument("--dict", type=Path, action="append")
    p.add_argument("--max-cluster-size", type=int)
    p.add_argument("--out", type=Path, required=True)
    _add_sgns(p)

    p = command("train-multicca", "multiCCA embeddings")
    p.add_argument("--corpus", type=_corpus_spec, action="append", required=True)
    p.add_argument("--dict", type=Path, action="append")
    p.add_argument("--anchor")
    p.add_argument("--reg", type=float)
    p.add_argument("--out", type=Path, required=True)
    _add_sgns(p)

    p = command("train-multiskip", "multiSkip embeddings from parallel corpora")
    p.add_argument("--parallel", type=_parallel_spec, action="append", required=True)
    p.add_argument("--model1-iterations", type=int)
    p.add_argument("--out", type=Path, required=True)
    _add_sgns(p)

    p = command("train-invariance", "translation-invariant factorization embeddings")
    p.add_argument("--corpus", type=_corpus_spec, action="append", required=True)
    p.add_argument("--parallel", type=_parallel_spec, action="append")
    p.add_argument("--dim", type=int)
    p.add_argument("--window", type=int)
    p.add_argument("--min-count", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--model1-iterations", type=int)
    p.add_argument("--out", type=Path, required=True)

    p = command("eval", "evaluate embeddings on a registered task or a dataset file")
    p.add_argument("--embeddings", type=Path, required=True)
    p.add_argument("--task", help="task id, optionally suffixed with -dev or -test")
    p.add_argument("--mode", choices=["dev", "test"])
    p.add_argument("--data-dir", type=Path)
    p.add_argument("--metric", choices=["word-similarity", "word-translation", "qvec", "qvec-cca",
                                        "doc-classification"])
    p.add_argument("--data", type=Path)
    p.add_argument("--train", type=Path)
    p.add_argument("--languages", type=_csv_list)

    p = command("intersect", "intersection of embedding vocabularies")
    p.add_argument("--embeddings", type=Path, nargs="+", required=True)
    p.add_argument("--out", type=Path)

    p = command("correlate", "Pearson correlations between intrinsic and extrinsic metric columns")
    p.add_argument("--scores", type=Path, required=True, help="CSV: header row of metric names, one row per run")
    p.add_argument("--intrinsic", type=_csv_list, required=True)
    p.add_argument("--extrinsic", type=_csv_list, required=True)

    p = command("serve", "run the HTTP evaluation service")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.add_argument("--data-dir", type=Path)
    p.add_argument("--storage-dir", type=Path)
    p.add_argument("--max-upload-bytes", type=int)
    return parser


def _merge_config(args: argparse.Namespace, defaults: dict) -> argparse.Namespace:
    config = {}
    if getattr(args, "config", None) is not None:
        config = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if not isinstance(config, dict):
            raise UsageError(f"{args.config}: config must be a JSON object")
    merged = {key: None for key in vars(args)}
    merged.update(defaults)
    merged.update({k.replace("-", "_"): v for k, v in config.items()})
    for key, value in vars(args).items():
        if value is not None:
            merged[key] = value
    return argparse.Namespace(**merged)


def _sgns_params(a) -> SgnsParams:
    return SgnsParams(dim=a.dim, window=a.window, epochs=a.epochs, negatives=a.negatives, min_count=a.min_count,
                      initial_lr=a.lr, seed=a.seed, noise_power=a.noise_power, subsample=a.subsample,
                      workers=a.threads)


def _read_corpora(specs):
    return [read_mono_corpus(path, lang) for lang, path in specs]


def _read_parallels(specs) -> list[ParallelCorpus]:
    return [read_parallel_corpus(s, t, a, src_lang=sl, tgt_lang=tl) for sl, tl, s, t, a in specs]


def _cmd_extract_dict(a):
    corpus = _read_parallels([a.parallel])[0]
    fwd = train_model1(corpus, a.iterations, workers=a.threads)
    rev = train_model1(corpus.reversed(), a.iterations, workers=a.threads)
    d = extract_dictionary(fwd, rev, a.tau)
    write_dictionary(d, a.out)
    print(f"{len(d)} pairs written to {a.out}")


def _cmd_train_sgns(a):
    from ..core import EmbeddingSet, merge_embeddings, normalize_unit
    from ..sgns import train_sgns
    import dataclasses

    params = _sgns_params(a)
    parts = []
    for i, corpus in enumerate(_read_corpora(a.corpus)):
        model = train_sgns(corpus.sentences, dataclasses.replace(params, seed=params.seed + i))
        keys = [LangWord(corpus.lang, t) for t in model.vocab.tokens]
        parts.append(EmbeddingSet(keys, model.input_vectors, dim=params.dim))
    emb = normalize_unit(merge_embeddings(parts))
    save_embeddings(emb, a.out)
    print(f"{len(emb)} vectors written to {a.out}")


def _cmd_train_multicluster(a):
    from ..estimators import multicluster_train

    emb = multicluster_train(_read_corpora(a.corpus), [read_dictionary(p) for p in a.dict], _sgns_params(a),
                             max_size=a.max_cluster_size)
    save_embeddings(emb, a.out)
    print(f"{len(emb)} vectors written to {a.out}")


def _cmd_train_multicca(a):
    from ..estimators import multicca_train, train_monolingual

    mono = train_monolingual(_read_corpora(a.corpus), _sgns_params(a))
    emb = multicca_train(mono, [read_dictionary(p) for p in a.dict], reg=a.reg, anchor=a.anchor)
    save_embeddings(emb, a.out)
    print(f"{len(emb)} vectors written to {a.out}")


def _cmd_train_multiskip(a):
    from ..estimators import multiskip_train

    emb = multiskip_train(_read_parallels(a.parallel), _sgns_params(a), model1_iterations=a.model1_iterations)
    save_embeddings(emb, a.out)
    print(f"{len(emb)} vectors written to {a.out}")


def _cmd_train_invariance(a):
    from ..estimators import build_alignment_matrix, build_pmi_matrix, ensure_alignments, invariance_train

    X, index = build_pmi_matrix(_read_corpora(a.corpus), window=a.window, min_count=a.min_count)
    parallel = [ensure_alignments(c, a.model1_iterations) for c in _read_parallels(a.parallel)]
    A = build_alignment_matrix(parallel, index)
    d = min(a.dim, len(index))
    if d < a.dim:
        logger.warning("vocabulary has %d words; reducing dim from %d", len(index), a.dim)
    emb, result = invariance_train(X, A, index, d=d, iterations=a.iterations, seed=a.seed)
    save_embeddings(emb, a.out)
    print(f"{len(emb)} vectors written to {a.out} (objective {result.objective:.6g})")


def _cmd_eval(a):
    from ..eval import (
        build_linguistic_matrix,
        eval_doc_classification,
        eval_word_similarity,
        eval_word_translation,
        multiqvec,
        multiqvec_cca,
        read_documents,
        read_similarity_dataset,
        read_translation_dataset,
    )
    from .tasks import load_tasks, run_task

    emb = load_embeddings(a.embeddings)
    if a.task:
        tasks = load_tasks(a.data_dir)
        task_id, mode = a.task, a.mode
        if task_id not in tasks:
            for suffix in ("dev", "test"):
                if task_id.endswith("-" + suffix) and task_id[: -len(suffix) - 1] in tasks:
                    task_id, mode = task_id[: -len(suffix) - 1], suffix
        if task_id not in tasks:
            raise UsageError(f"unknown task {a.task!r}; known: {', '.join(sorted(tasks))}")
        report = run_task(emb, tasks[task_id], mode or "dev")
    elif a.metric and a.data:
        langs = set(a.languages) if a.languages else None
        if a.metric == "word-similarity":
            report = eval_word_similarity(emb, read_similarity_dataset(a.data))
        elif a.metric == "word-translation":
            report = eval_word_translation(emb, read_translation_dataset(a.data))
        elif a.metric == "qvec":
            report = multiqvec(emb, build_linguistic_matrix(a.data, langs), langs, metric="qvec")
        elif a.metric == "qvec-cca":
            report = multiqvec_cca(emb, build_linguistic_matrix(a.data, langs), langs, metric="qvec-cca")
        else:
            if a.train is None:
                raise UsageError("doc-classification needs --train")
            report = eval_doc_classification(emb, read_documents(a.train), read_documents(a.data))
    else:
        raise UsageError("eval needs --task, or --metric with --data")
    print(report)


def _cmd_intersect(a):
    from ..eval import intersect_vocabularies

    common = intersect_vocabularies([load_embeddings(p) for p in a.embeddings])
    if a.out:
        a.out.write_text("".join(f"{w}\n" for w in common), encoding="utf-8")
    print(f"{len(common)} shared words")


def _cmd_correlate(a):
    from ..eval import metric_correlation

    with open(a.scores, encoding="utf-8", newline="") as f:
        rows = list(csv.reader(f))
    header, body = rows[0], [r for r in rows[1:] if r]
    columns = {name: [float(r[i]) for r in body] for i, name in enumerate(header) if name in a.intrinsic + a.extrinsic}
    print(metric_correlation(columns, a.intrinsic, a.extrinsic).format())


def _cmd_serve(a):
    import uvicorn

    from .service import create_app

    app = create_app(a.data_dir, a.storage_dir, a.max_upload_bytes)
    uvicorn.run(app, host=a.host, port=a.port)


COMMANDS = {
    "extract-dict": (_cmd_extract_dict, dict(tau=DEFAULT_TAU, iterations=10, threads=1, seed=0)),
    "train-sgns": (_cmd_train_sgns, SGNS_DEFAULTS),
    "train-multicluster": (_cmd_train_multicluster, {**SGNS_DEFAULTS, "max_cluster_size": 1000, "dict": []}),
    "train-multicca": (_cmd_train_multicca, {**SGNS_DEFAULTS, "anchor": "en", "reg": None, "dict": []}),
    "train-multiskip": (_cmd_train_multiskip, {**SGNS_DEFAULTS, "model1_iterations": 5}),
    "train-invariance": (_cmd_train_invariance, dict(dim=512, window=3, min_count=5, iterations=100,
                                                     model1_iterations=5, seed=0, parallel=[])),
    "eval": (_cmd_eval, dict(seed=0)),
    "intersect": (_cmd_intersect, dict(seed=0)),
    "correlate": (_cmd_correlate, dict(seed=0)),
    "serve": (_cmd_serve, dict(host="127.0.0.1", port=8000, seed=0, max_upload_bytes=64 * 1024 * 1024)),
}


def cli_run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    func, defaults = COMMANDS[args.command]
    try:
        func(_merge_config(args, defaults))
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"polyembed {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"polyembed {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(cli_run())
