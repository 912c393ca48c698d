"""Command-line entry point: train, predict, eval, similar, pair, recommend,
synth, gradcheck, serve.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import csv as csv_mod
import io
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import baselines, evaluation, model_io, queries, training
from .data import SyntheticSpec, generate_synthetic, load_matches, save_matches
from .errors import ContractError, DataError, NumericalError
from .model import Roster, win_probability


@click.group()
def cli():
    """Avatar synergy/opposition embeddings: train, evaluate, query, serve."""


def _load_dataset(path, fmt):
    return load_matches(path, fmt)


def _echo_rows(rows, header, fmt):
    """Human-readable table by default, csv rows with --format csv."""
    if fmt == "csv":
        out = io.StringIO()
        writer = csv_mod.writer(out, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        click.echo(out.getvalue(), nl=False)
        return
    widths = [max(len(str(h)), *(len(str(r[i])) for r in rows)) if rows else len(str(h))
              for i, h in enumerate(header)]
    click.echo("  ".join(str(h).ljust(w) for h, w in zip(header, widths)))
    for r in rows:
        click.echo("  ".join(str(v).ljust(w) for v, w in zip(r, widths)))


format_option = click.option("--format", "fmt", type=click.Choice(["human", "csv"]),
                             default="human", show_default=True,
                             help="Output style: table for people, csv for machines.")
data_format_option = click.option("--data-format", type=click.Choice(["jsonl", "csv"]),
                                  default="jsonl", show_default=True,
                                  help="Match file format.")


@cli.command()
@click.option("--data", "data_path", required=True, type=click.Path(), help="Training match file.")
@click.option("--dim", default=16, show_default=True, help="Latent dimension K.")
@click.option("--lr", default=0.1, show_default=True, help="AdaGrad learning rate.")
@click.option("--epochs", default=20, show_default=True)
@click.option("--batch", default=256, show_default=True, help="Mini-batch size.")
@click.option("--l2", default=0.0, show_default=True, help="L2 penalty strength.")
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(), help="Model file to write.")
@click.option("--valid", "valid_path", type=click.Path(), default=None,
              help="Validation match file; enables best-epoch checkpointing.")
@data_format_option
def train(data_path, dim, lr, epochs, batch, l2, seed, out_path, valid_path, data_format):
    """Fit the embedding model and write a model file."""
    dataset = _load_dataset(data_path, data_format)
    validation = None
    if valid_path is not None:
        validation = _load_dataset(valid_path, data_format)
        if validation.registry != dataset.registry:
            # registries are built per file; align by name against training
            remap = {}
            for name in validation.registry.names:
                if name not in dataset.registry.names:
                    raise DataError(f"validation avatar {name!r} absent from training data")
            from .data import Dataset, MatchRecord
            reindex = [dataset.registry.index_of(n) for n in validation.registry.names]
            matches = [MatchRecord(red=Roster(reindex[i] for i in m.red),
                                   blue=Roster(reindex[i] for i in m.blue),
                                   outcome=m.outcome)
                       for m in validation.matches]
            validation = Dataset(dataset.registry, matches)
    config = training.TrainConfig(latent_dim=dim, learning_rate=lr, epochs=epochs,
                                  batch_size=batch, l2_lambda=l2, seed=seed)

    def progress(epoch, loss, val_auc):
        line = f"epoch {epoch:>3}  loss {loss:.6f}"
        if val_auc is not None:
            line += f"  val_auc {val_auc:.4f}"
        click.echo(line)

    result = training.train(config, dataset, validation=validation, progress=progress)
    model_io.save_model(out_path, result.params)
    click.echo(f"wrote {out_path} (best epoch {result.best_epoch})")


@cli.command()
@click.option("--model", "model_path", required=True, type=click.Path())
@click.option("--red", required=True, help="Comma-separated red roster names.")
@click.option("--blue", required=True, help="Comma-separated blue roster names.")
@format_option
def predict(model_path, red, blue, fmt):
    """Win probability for red vs blue (1-5 avatars per side)."""
    params = model_io.load_gae(model_path)
    red_idx = params.registry.indices_of([n.strip() for n in red.split(",")])
    blue_idx = params.registry.indices_of([n.strip() for n in blue.split(",")])
    p = win_probability(params, Roster(red_idx), Roster(blue_idx))
    if fmt == "csv":
        _echo_rows([[repr(p)]], ["p_red_win"], "csv")
    else:
        click.echo(f"p(red wins) = {p:.6f}")


@cli.command()
@click.option("--model", "model_path", required=True, type=click.Path())
@click.option("--avatar", required=True)
@click.option("--top-k", default=5, show_default=True)
@format_option
def similar(model_path, avatar, top_k, fmt):
    """Most similar avatars by embedding cosine."""
    params = model_io.load_gae(model_path)
    index = params.registry.index_of(avatar.strip())
    ranked = queries.similar_avatars(params, index, top_k)
    rows = [[params.registry.name_of(i), repr(s) if fmt == "csv" else f"{s:.6f}"]
            for i, s in ranked]
    _echo_rows(rows, ["avatar", "cosine"], fmt)


@cli.command()
@click.option("--model", "model_path", required=True, type=click.Path())
@click.option("--a", "name_a", required=True)
@click.option("--b", "name_b", required=True)
@format_option
def pair(model_path, name_a, name_b, fmt):
    """Synergy, opposition, and similarity scores for a pair."""
    params = model_io.load_gae(model_path)
    i = params.registry.index_of(name_a.strip())
    j = params.registry.index_of(name_b.strip())
    scores = queries.explain_pair(params, i, j)
    if fmt == "csv":
        rows = [[repr(scores.synergy), repr(scores.opposition), repr(scores.cosine)]]
        _echo_rows(rows, ["synergy", "opposition", "cosine"], "csv")
    else:
        click.echo(f"synergy    {scores.synergy:.6f}")
        click.echo(f"opposition {scores.opposition:.6f}")
        click.echo(f"cosine     {scores.cosine:.6f}")


def _parse_names(params, value):
    if value is None or value.strip() == "":
        return ()
    return params.registry.indices_of([n.strip() for n in value.split(",")])


@cli.command()
@click.option("--model", "model_path", required=True, type=click.Path())
@click.option("--ally", default="", help="Comma-separated allies picked so far (0-4).")
@click.option("--enemy", default="", help="Comma-separated enemies picked so far (0-5).")
@click.option("--pool", default="", help="Candidate pool; defaults to all unpicked avatars.")
@click.option("--familiar", default="", help="Familiar avatars for similarity fallback.")
@click.option("--top-k", default=5, show_default=True)
@click.option("--sim-k", default=3, show_default=True)
@format_option
def recommend(model_path, ally, enemy, pool, familiar, top_k, sim_k, fmt):
    """Ranked last-pick recommendations with logit-delta explanations."""
    params = model_io.load_gae(model_path)
    draft = queries.DraftState(ally=_parse_names(params, ally),
                               enemy=_parse_names(params, enemy),
                               pool=_parse_names(params, pool) or None,
                               familiar=_parse_names(params, familiar) or None)
    if draft.familiar:
        result = queries.recommend_with_familiarity(params, draft, top_k=top_k, sim_k=sim_k)
        picks, familiar_best = result.picks, result.familiar_best
    else:
        picks, familiar_best = queries.recommend_pick(params, draft, top_k=top_k), None

    def name(i):
        return params.registry.name_of(i)

    def fnum(x):
        return repr(x) if fmt == "csv" else f"{x:.6f}"

    rows = [[name(r.avatar), fnum(r.win_probability), fnum(r.bias_delta),
             fnum(r.synergy_delta), fnum(r.opposition_delta),
             " ".join(name(f) for f, _ in r.similar_familiar)]
            for r in picks]
    _echo_rows(rows, ["avatar", "win_probability", "bias_delta", "synergy_delta",
                      "opposition_delta", "similar_familiar"], fmt)
    if familiar_best is not None and fmt == "human":
        click.echo(f"best familiar pick: {name(familiar_best.avatar)} "
                   f"(p = {familiar_best.win_probability:.6f})")


@cli.command()
@click.option("--out", "out_path", required=True, type=click.Path(), help="Match file to write.")
@click.option("--truth-out", type=click.Path(), default=None,
              help="Also write the ground-truth model file.")
@click.option("--n-avatars", default=30, show_default=True)
@click.option("--dim", default=8, show_default=True)
@click.option("--matches", "n_matches", default=10_000, show_default=True)
@click.option("--embedding-scale", default=0.55, show_default=True)
@click.option("--matrix-scale", default=0.35, show_default=True)
@click.option("--bias-scale", default=0.12, show_default=True)
@click.option("--seed", default=0, show_default=True)
@data_format_option
def synth(out_path, truth_out, n_avatars, dim, n_matches, embedding_scale,
          matrix_scale, bias_scale, seed, data_format):
    """Generate a synthetic match log from a known ground-truth model."""
    spec = SyntheticSpec(n_avatars=n_avatars, latent_dim=dim,
                         embedding_scale=embedding_scale, matrix_scale=matrix_scale,
                         bias_scale=bias_scale, n_matches=n_matches, seed=seed)
    dataset, truth = generate_synthetic(spec)
    save_matches(dataset, out_path, data_format)
    click.echo(f"wrote {n_matches} matches over {n_avatars} avatars to {out_path}")
    if truth_out is not None:
        model_io.save_model(truth_out, truth)
        click.echo(f"wrote ground truth to {truth_out}")


@cli.command()
@click.option("--n", default=10, show_default=True, help="Avatars in the random model.")
@click.option("--dim", default=4, show_default=True)
@click.option("--batch", default=8, show_default=True, help="Random matches in the batch.")
@click.option("--step", default=1e-5, show_default=True)
@click.option("--l2", default=0.0, show_default=True)
@click.option("--seed", default=0, show_default=True)
def gradcheck(n, dim, batch, step, l2, seed):
    """Validate analytic gradients against central finite differences."""
    from .data import MatchRecord
    from .model import AvatarRegistry, ModelParams

    rng = np.random.default_rng(seed)
    registry = AvatarRegistry([f"avatar{i:02d}" for i in range(n)])
    params = ModelParams(embeddings=rng.normal(0, 0.5, size=(n, dim)),
                         synergy=rng.normal(0, 0.5 / dim, size=(dim, dim)),
                         opposition=rng.normal(0, 0.5 / dim, size=(dim, dim)),
                         bias=rng.normal(0, 0.1, size=n), registry=registry)
    records = []
    for _ in range(batch):
        picks = rng.choice(n, size=10, replace=False)
        records.append(MatchRecord(red=Roster(picks[:5]), blue=Roster(picks[5:]),
                                   outcome=int(rng.integers(0, 2))))
    report = training.finite_difference_check(params, records, step=step, l2_lambda=l2)
    for block, err in report.block_relative_error.items():
        click.echo(f"{block:<11} relative error {err:.3e}")
    click.echo(f"max relative error {report.max_relative_error:.3e}")
    if not report.passes(1e-5):
        raise NumericalError("gradient check failed at tolerance 1e-5")


@cli.command("eval")
@click.option("--data", "data_path", required=True, type=click.Path())
@click.option("--model-kind", default="gae,lr,fm", show_default=True,
              help="Comma-separated subset of gae,lr,fm.")
@click.option("--grid", "grid_path", type=click.Path(), default=None,
              help="JSON file: {kind: [hyperparameter objects]}; default one point per kind.")
@click.option("--folds", default=10, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--report", "report_path", required=True, type=click.Path(),
              help="Benchmark csv to write.")
@data_format_option
def eval_cmd(data_path, model_kind, grid_path, folds, seed, report_path, data_format):
    """Cross-validated benchmark with paired t-tests between model kinds."""
    dataset = _load_dataset(data_path, data_format)
    kinds = [k.strip() for k in model_kind.split(",") if k.strip()]
    for k in kinds:
        if k not in evaluation.MODEL_KINDS:
            raise DataError(f"unknown model kind {k!r}; expected subset of "
                            + ",".join(evaluation.MODEL_KINDS))
    grids: dict = {}
    if grid_path is not None:
        try:
            grids = json.loads(Path(grid_path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"cannot read grid file {grid_path}: {exc}") from None
        if not isinstance(grids, dict):
            raise DataError("grid file must map model kind to a list of objects")
    results = []
    for kind in kinds:
        grid = grids.get(kind, [{}])
        results.extend(evaluation.cross_validate(dataset, kind, grid,
                                                 folds=folds, seed=seed))
    Path(report_path).write_text(evaluation.benchmark_csv(results), encoding="utf-8")
    click.echo(evaluation.benchmark_table(results), nl=False)
    click.echo(f"wrote {report_path}")


@cli.command()
@click.option("--model", "model_path", required=True, type=click.Path())
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--log-requests", is_flag=True, default=False)
def serve(model_path, host, port, log_requests):
    """Run the HTTP service over a model file (blocks)."""
    import uvicorn

    from .service import create_app

    if not 1 <= port <= 65535:
        raise ContractError("port must be in [1, 65535]")
    params = model_io.load_gae(model_path)
    app = create_app(params, log_requests=log_requests)
    uvicorn.run(app, host=host, port=port, log_level="info" if log_requests else "warning")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return 1
    except DataError as exc:
        click.echo(f"data error: {exc}", err=True)
        return 2
    except ContractError as exc:
        click.echo(f"data error: {exc}", err=True)
        return 2
    except NumericalError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
