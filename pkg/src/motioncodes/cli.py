"""Command line front end.

Machine-readable output goes to stdout, prompts and progress to stderr.
Exit codes: 0 on success, 1 on validation or parse errors, 2 on usage
errors (argparse raises those itself).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .codebook import Codebook, default_codebook, dump_codebook, load_codebook
from .errors import InvalidAnswerError, MotionCodeError
from .features import load_dataset, load_embeddings, save_dataset, save_embeddings
from .metrics import component_distance, evaluate, format_accuracy_table, hamming
from .model import (
    ModelConfig,
    OPTIMIZERS,
    PredictorModel,
    TrainConfig,
    load_model,
    predict,
    save_model,
    train,
)
from .synth import inject_noun_noise, synth_dataset
from .taxonomy import (
    ContactDuration,
    Dof,
    Engagement,
    Recurrence,
    TaxonomyAnswers,
    encode_from_answers,
    enumerate_all,
    format_code,
    from_bits,
    parse_code,
    to_bits,
    to_classes,
)

_DOF_WORDS = {Dof.NONE: "none", Dof.ONE: "one", Dof.MANY: "many"}


def _load_book(args) -> Codebook:
    path = getattr(args, "codebook", None)
    if path is None:
        return default_codebook()
    with open(path, "rb") as handle:
        return load_codebook(handle)


def _describe_interaction(code) -> str:
    if not code.interaction.is_contact:
        return "non-contact"
    engagement = "rigid" if code.interaction.engagement is Engagement.RIGID else "soft"
    duration = ("continuous" if code.interaction.duration is ContactDuration.CONTINUOUS
                else "discontinuous")
    return f"contact, {engagement}, {duration}"


def cmd_parse(args) -> int:
    code = parse_code(args.code)
    book = _load_book(args)
    classes = to_classes(code)
    verbs = book.verbs_for(code)
    if args.format == "json":
        print(json.dumps({
            "code": format_code(code),
            "bits": to_bits(code),
            "classes": classes._asdict(),
            "interaction": _describe_interaction(code),
            "recurrence": code.recurrence.name.lower(),
            "prismatic": _DOF_WORDS[code.prismatic],
            "revolute": _DOF_WORDS[code.revolute],
            "passive": code.passive.name.lower(),
            "verbs": verbs,
        }))
        return 0
    print(f"code: {format_code(code)}")
    print(f"bits: {to_bits(code)}")
    print(f"interaction: {_describe_interaction(code)} (class {classes.interaction})")
    print(f"recurrence: {code.recurrence.name.lower()} (class {classes.recurrence})")
    print(f"prismatic dof: {_DOF_WORDS[code.prismatic]} (class {classes.prismatic})")
    print(f"revolute dof: {_DOF_WORDS[code.revolute]} (class {classes.revolute})")
    print(f"passive motion: {code.passive.name.lower()} (class {classes.passive})")
    print(f"verbs: {', '.join(verbs) if verbs else '(none in codebook)'}")
    return 0


def cmd_fmt(args) -> int:
    text = args.bits.strip()
    code = parse_code(text) if "-" in text else from_bits(text)
    print(format_code(code))
    return 0


def cmd_enumerate(args) -> int:
    codes = enumerate_all()
    if args.format == "json":
        print(json.dumps([format_code(c) for c in codes]))
    else:
        for code in codes:
            print(format_code(code))
    return 0


def cmd_dist(args) -> int:
    a = parse_code(args.a)
    b = parse_code(args.b)
    if args.format == "json":
        print(json.dumps({"hamming": hamming(a, b),
                          "components": component_distance(a, b)}))
    elif args.components:
        print(component_distance(a, b))
    else:
        print(hamming(a, b))
    return 0


def cmd_nearest(args) -> int:
    code = parse_code(args.code)
    book = _load_book(args)
    rows = book.nearest_verbs(code, args.k)
    if args.format == "json":
        print(json.dumps([
            {"verb": label, "code": format_code(c), "distance": d}
            for label, c, d in rows
        ]))
    else:
        width = max((len(label) for label, _, _ in rows), default=4)
        for label, c, d in rows:
            print(f"{label.ljust(width)}  {format_code(c)}  {d}")
    return 0


def _parse_yes_no(token: str) -> bool:
    if token == "y":
        return True
    if token == "n":
        return False
    raise InvalidAnswerError(f"expected y or n, got {token!r}")


def _parse_choice(options: dict):
    def parser(token: str):
        if token in options:
            return options[token]
        raise InvalidAnswerError(
            f"expected one of {'/'.join(options)}, got {token!r}")
    return parser


class _ScriptedAnswers:
    """Answer source reading one token per line; invalid answers abort."""

    def __init__(self, lines):
        self._tokens = [line.strip() for line in lines if line.strip()]
        self._next = 0

    def ask(self, prompt, parser):
        if self._next >= len(self._tokens):
            raise InvalidAnswerError(f"ran out of answers at the question {prompt!r}")
        token = self._tokens[self._next]
        self._next += 1
        return parser(token)


class _InteractiveAnswers:
    """Answer source prompting on stderr; invalid answers re-prompt."""

    def ask(self, prompt, parser):
        while True:
            sys.stderr.write(prompt)
            sys.stderr.flush()
            line = sys.stdin.readline()
            if not line:
                raise InvalidAnswerError("input closed before all questions were answered")
            try:
                return parser(line.strip())
            except InvalidAnswerError as exc:
                sys.stderr.write(f"{exc}\n")


def _run_wizard(source) -> "TaxonomyAnswers":
    contact = source.ask("contact between the active and passive objects? [y/n] ",
                         _parse_yes_no)
    engagement = None
    duration = None
    if contact:
        engagement = source.ask(
            "engagement? [rigid/soft] ",
            _parse_choice({"rigid": Engagement.RIGID, "soft": Engagement.SOFT}))
        duration = source.ask(
            "contact duration? [discontinuous/continuous] ",
            _parse_choice({"discontinuous": ContactDuration.DISCONTINUOUS,
                           "continuous": ContactDuration.CONTINUOUS}))
    recurrence = source.ask(
        "recurrence? [acyclic/cyclic] ",
        _parse_choice({"acyclic": Recurrence.ACYCLIC, "cyclic": Recurrence.CYCLIC}))
    dof_parser = _parse_choice({"0": Dof.NONE, "1": Dof.ONE, "many": Dof.MANY})
    prismatic = source.ask("prismatic degrees of freedom? [0/1/many] ", dof_parser)
    revolute = source.ask("revolute degrees of freedom? [0/1/many] ", dof_parser)
    passive = source.ask(
        "passive object moving relative to the active object? [y/n] ", _parse_yes_no)
    return TaxonomyAnswers(contact=contact, recurrence=recurrence,
                           prismatic=prismatic, revolute=revolute,
                           passive_moving=passive, engagement=engagement,
                           duration=duration)


def cmd_wizard(args) -> int:
    book = _load_book(args)
    if args.answers:
        source = _ScriptedAnswers(
            Path(args.answers).read_text(encoding="utf-8").splitlines())
    elif not sys.stdin.isatty():
        source = _ScriptedAnswers(sys.stdin.read().splitlines())
    else:
        source = _InteractiveAnswers()
    code = encode_from_answers(_run_wizard(source))
    print(format_code(code))
    rows = book.nearest_verbs(code, args.k) if len(book) else []
    if rows:
        nearest = rows[0][2]
        labels = [label for label, _, d in rows if d == nearest]
        print(f"nearest verbs (distance {nearest}): {', '.join(labels)}")
    return 0


def cmd_codebook(args) -> int:
    if args.action == "validate":
        with open(args.path, "rb") as handle:
            book = load_codebook(handle)
        print(f"ok: {len(book)} entries")
        return 0
    book = _load_book(args)
    if args.action == "export":
        sys.stdout.write(dump_codebook(book))
        return 0
    for entry in book.entries:
        print(f"{format_code(entry.code)}  {', '.join(v.display() for v in entry.verbs)}")
    return 0


def _parse_code_lines(path) -> list:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [parse_code(line) for line in lines if line.strip()]


def cmd_synth(args) -> int:
    if args.codes:
        codes = _parse_code_lines(args.codes)
    else:
        codes = [entry.code for entry in default_codebook().entries]
    records, table = synth_dataset(codes, args.n, d_v=args.dv,
                                   sigma=args.sigma, seed=args.seed)
    if args.split_test:
        if args.split_test >= len(records):
            raise MotionCodeError(
                f"--split-test {args.split_test} leaves no training records")
        if not args.test_output:
            raise MotionCodeError("--split-test needs --test-output")
        save_dataset(records[:len(records) - args.split_test], args.output)
        save_dataset(records[len(records) - args.split_test:], args.test_output)
        print(f"wrote {len(records) - args.split_test} train records to {args.output} "
              f"and {args.split_test} test records to {args.test_output}",
              file=sys.stderr)
    else:
        save_dataset(records, args.output)
        print(f"wrote {len(records)} records to {args.output}", file=sys.stderr)
    if args.embeddings_out:
        save_embeddings(table, args.embeddings_out)
        print(f"wrote {len(table)} noun vectors to {args.embeddings_out}",
              file=sys.stderr)
    return 0


def _embedding_table(args):
    return load_embeddings(args.embeddings) if args.embeddings else None


def cmd_train(args) -> int:
    records = load_dataset(args.data)
    if not records:
        raise MotionCodeError(f"{args.data}: the dataset is empty")
    table = _embedding_table(args)
    if args.use_nouns and table is None:
        raise MotionCodeError("--use-nouns needs --embeddings")
    model_config = ModelConfig(
        d_v=records[0].rgb.size,
        d_n=table.dimension if (table and args.use_nouns) else 0,
        use_nouns=args.use_nouns,
        weight_decay=args.weight_decay,
        seed=args.seed,
    )
    train_config = TrainConfig(
        epochs=args.epochs,
        base_lr=args.lr,
        decay_factor=args.decay_factor,
        decay_every=args.decay_every,
        batch_size=args.batch_size,
        seed=args.seed,
        optimizer=args.optimizer,
    )
    model = PredictorModel.initialized(model_config)
    trained, traces = train(model, records, table, train_config)
    save_model(trained, args.output)
    finals = ", ".join(f"{m} {t[-1]:.4f}" for m, t in traces.items() if t)
    print(f"trained on {len(records)} records for {args.epochs} epochs "
          f"(final loss: {finals})", file=sys.stderr)
    print(f"wrote model to {args.output}", file=sys.stderr)
    if args.figures:
        from .report import save_loss_figure, write_loss_csv

        figures = Path(args.figures)
        figures.mkdir(parents=True, exist_ok=True)
        save_loss_figure(traces, figures / "loss_trace.png")
        write_loss_csv(traces, figures / "loss_trace.csv")
        print(f"wrote loss figure and trace to {figures}", file=sys.stderr)
    return 0


def _predictions(args):
    records = load_dataset(args.data)
    if not records:
        raise MotionCodeError(f"{args.data}: the dataset is empty")
    model = load_model(args.model)
    table = _embedding_table(args)
    if model.config.use_nouns and table is None:
        raise MotionCodeError("this model uses noun features; pass --embeddings")
    return records, model, [predict(model, r, table) for r in records]


def cmd_predict(args) -> int:
    records, _, predictions = _predictions(args)
    if args.format == "json":
        print(json.dumps([
            {"id": r.id, "rgb": format_code(p.rgb_code),
             "flow": format_code(p.flow_code), "fused": format_code(p.fused_code)}
            for r, p in zip(records, predictions)
        ]))
    else:
        for record, p in zip(records, predictions):
            print(f"{record.id}\t{format_code(p.rgb_code)}"
                  f"\t{format_code(p.flow_code)}\t{format_code(p.fused_code)}")
    return 0


def cmd_eval(args) -> int:
    records, _, predictions = _predictions(args)
    unlabeled = [r.id for r in records if r.label is None]
    if unlabeled:
        raise MotionCodeError(
            f"{args.data}: {len(unlabeled)} records have no code label "
            f"(first: {unlabeled[0]!r})")
    reports = {
        "RGB": evaluate([(p.rgb_code, r.label) for r, p in zip(records, predictions)]),
        "Flow": evaluate([(p.flow_code, r.label) for r, p in zip(records, predictions)]),
        "Fused": evaluate([(p.fused_code, r.label) for r, p in zip(records, predictions)]),
    }
    if args.format == "json":
        text = json.dumps({name.lower(): report.to_json_dict()
                           for name, report in reports.items()})
    else:
        text = format_accuracy_table(reports)
    if args.output:
        Path(args.output).write_text(text + "\n", encoding="utf-8")
        print(f"wrote report to {args.output}", file=sys.stderr)
    else:
        print(text)
    if args.figures:
        from .report import save_confusion_figure

        figures = Path(args.figures)
        figures.mkdir(parents=True, exist_ok=True)
        for name, report in reports.items():
            save_confusion_figure(report, figures / f"confusion_{name.lower()}.png",
                                  title=name)
        print(f"wrote confusion figures to {figures}", file=sys.stderr)
    return 0


def cmd_noise(args) -> int:
    records = load_dataset(args.data)
    table = load_embeddings(args.embeddings)
    noisy = inject_noun_noise(records, args.rho, table.tokens(), seed=args.seed)
    save_dataset(noisy, args.output)
    changed = sum(a.nouns != b.nouns for a, b in zip(records, noisy))
    print(f"replaced nouns on {changed} of {len(records)} records", file=sys.stderr)
    return 0


def _add_format(parser, choices=("table", "json")) -> None:
    parser.add_argument("--format", choices=choices, default="table",
                        help="output format (default: table)")


def _add_codebook(parser) -> None:
    parser.add_argument("--codebook", metavar="PATH",
                        help="codebook JSON file (default: the built-in book)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="motioncodes",
        description="Nine-bit motion code toolkit: codec, codebook, "
                    "synthetic data, training and evaluation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="decode a motion code string")
    p.add_argument("code")
    _add_codebook(p)
    _add_format(p)
    p.set_defaults(handler=cmd_parse)

    p = sub.add_parser("fmt", help="canonicalize nine bits or a code string")
    p.add_argument("bits")
    p.set_defaults(handler=cmd_fmt)

    p = sub.add_parser("enumerate", help="list all 180 valid codes")
    _add_format(p)
    p.set_defaults(handler=cmd_enumerate)

    p = sub.add_parser("dist", help="distance between two codes")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--components", action="store_true",
                   help="count differing components instead of bits")
    _add_format(p)
    p.set_defaults(handler=cmd_dist)

    p = sub.add_parser("nearest", help="codebook verbs nearest to a code")
    p.add_argument("code")
    p.add_argument("--k", type=int, default=5, help="rows to return (default: 5)")
    _add_codebook(p)
    _add_format(p)
    p.set_defaults(handler=cmd_nearest)

    p = sub.add_parser("wizard", help="build a code by answering questions")
    p.add_argument("--answers", metavar="PATH",
                   help="scripted answers, one token per line")
    p.add_argument("--k", type=int, default=5,
                   help="nearest verb rows to consider (default: 5)")
    _add_codebook(p)
    p.set_defaults(handler=cmd_wizard)

    p = sub.add_parser("codebook", help="show, export or validate a codebook")
    actions = p.add_subparsers(dest="action", required=True)
    show = actions.add_parser("show", help="print entries with their verbs")
    _add_codebook(show)
    show.set_defaults(handler=cmd_codebook)
    export = actions.add_parser("export", help="print the book as JSON")
    _add_codebook(export)
    export.set_defaults(handler=cmd_codebook)
    validate = actions.add_parser("validate", help="check a codebook file")
    validate.add_argument("path")
    validate.set_defaults(handler=cmd_codebook)

    p = sub.add_parser("synth", help="generate a synthetic labeled dataset")
    p.add_argument("--codes", metavar="PATH",
                   help="file with one code per line (default: the built-in book)")
    p.add_argument("--n", type=int, default=1200, help="records to generate")
    p.add_argument("--dv", type=int, default=64, help="visual feature length")
    p.add_argument("--sigma", type=float, default=0.1, help="noise scale")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", metavar="PATH", required=True)
    p.add_argument("--embeddings-out", metavar="PATH",
                   help="also write the synthetic noun vectors")
    p.add_argument("--split-test", type=int, metavar="M",
                   help="hold out the last M records")
    p.add_argument("--test-output", metavar="PATH",
                   help="file for the held-out records")
    p.set_defaults(handler=cmd_synth)

    p = sub.add_parser("train", help="fit a model on a labeled dataset")
    p.add_argument("--data", metavar="PATH", required=True)
    p.add_argument("--output", metavar="PATH", required=True,
                   help="file for the trained model")
    p.add_argument("--embeddings", metavar="PATH")
    p.add_argument("--use-nouns", action="store_true",
                   help="append mean noun vectors to the visual features")
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--lr", type=float, default=3e-4)
    p.add_argument("--decay-every", type=int, default=5)
    p.add_argument("--decay-factor", type=float, default=0.6)
    p.add_argument("--weight-decay", type=float, default=0.0)
    p.add_argument("--batch-size", type=int, default=4)
    p.add_argument("--optimizer", choices=OPTIMIZERS, default="adam")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--figures", metavar="DIR",
                   help="directory for the loss figure and trace")
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("predict", help="classify records with a trained model")
    p.add_argument("--data", metavar="PATH", required=True)
    p.add_argument("--model", metavar="PATH", required=True)
    p.add_argument("--embeddings", metavar="PATH")
    _add_format(p)
    p.set_defaults(handler=cmd_predict)

    p = sub.add_parser("eval", help="score a model on a labeled dataset")
    p.add_argument("--data", metavar="PATH", required=True)
    p.add_argument("--model", metavar="PATH", required=True)
    p.add_argument("--embeddings", metavar="PATH")
    p.add_argument("--output", metavar="PATH", help="write the report here")
    p.add_argument("--figures", metavar="DIR",
                   help="directory for confusion matrix figures")
    _add_format(p)
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("noise", help="corrupt a fraction of the noun labels")
    p.add_argument("--data", metavar="PATH", required=True)
    p.add_argument("--rho", type=float, required=True,
                   help="fraction of records to corrupt")
    p.add_argument("--embeddings", metavar="PATH", required=True,
                   help="embedding table supplying the vocabulary")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", metavar="PATH", required=True)
    p.set_defaults(handler=cmd_noise)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except MotionCodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def run() -> None:
    raise SystemExit(main())
