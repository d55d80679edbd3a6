"""
Configuration-driven experiment runners.

Each runner trains and evaluates once per configured seed, writes its CSVs
under the hashed output directory and returns a RunSummary whose checks
carry per-seed pass counts. A SkewBenchError inside one (setting, seed)
becomes a record with status "error" and the run goes on.
"""
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

from skewbench.exceptions import DomainError, SkewBenchError
from skewbench.models.datasets import LabelSource
from skewbench.models.experiment import (
    ExperimentConfig,
    ExperimentName,
    RecordStatus,
    RunRecord,
    RunSummary,
)
from skewbench.models.forest import ForestParams
from skewbench.services import reports
from skewbench.services.bias import (
    alpha_sensitivity_sweep,
    delta_p_simplified,
    exact_precision,
    expected_precision_contaminated,
    expected_precision_two_class,
    expected_precision_uniform,
    overestimation_ratio,
)
from skewbench.services.datagen import (
    PAIR_SEPARATOR,
    LabeledSet,
    PairList,
    Population,
    TestSet,
    build_test_set,
    build_training_set,
    generate_population,
    ingest_pair_list,
    pair_population,
    partition_known,
    synthesize_interactome,
)
from skewbench.services.forest import ForestModel, load_scores, predict_scores, train
from skewbench.services.logging import log_timing, run_context
from skewbench.services.metrics import (
    PRCurve,
    RankedReport,
    ScoredTestSet,
    class_accuracies,
    corrected_pr,
    empirical_vs_expected,
    pooled_threshold,
    pr_curve,
    ranked_report,
    simulate_channel,
    threshold_dominance,
)
from skewbench.services.skew import derive_rng
from skewbench.services.validation import (
    CheckSuite,
    non_decreasing,
    relative_match,
    strictly_increasing,
)

logger = logging.getLogger(__name__)

TABLE_ONE_ROWS = {
    "observed": "Sample from B set",
    "ideal": "Sample from A set",
    "corrected": "Corrected Label",
}
NESTED_TEST_STREAM = "nested"
PROPOSED_INTERPRETATION = (
    "each configured p_tilde stands in for the natural prevalence of its setting "
    "and the proposed test set is mixed at p_tilde + delta_p"
)


def setting_label(p_tilde: float) -> str:
    return f"{p_tilde:g}"


@dataclass
class _Run:
    """Mutable state of one experiment run."""

    config: ExperimentConfig
    out_dir: Path
    records: List[RunRecord] = field(default_factory=list)
    suite: CheckSuite = field(default_factory=CheckSuite)
    tables: Dict[str, str] = field(default_factory=dict)
    notices: List[str] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def relative(self, path: Path) -> str:
        return path.relative_to(self.out_dir).as_posix()

    def add_table(self, name: str, path: Path) -> None:
        self.tables[name] = self.relative(path)

    def fail(self, setting: str, seed: int, case: str, error: Exception, **values) -> None:
        logger.error(
            "Evaluation failed",
            extra={"setting": setting, "seed": seed, "case": case, "error": str(error)},
        )
        self.records.append(
            RunRecord(
                setting=setting,
                seed=seed,
                case=case,
                status=RecordStatus.ERROR,
                message=str(error),
                **values,
            )
        )

    def aupr(self, setting: str, seed: int, case: str) -> Optional[float]:
        for record in self.records:
            if (
                record.setting == setting
                and record.seed == seed
                and record.case == case
                and record.status is RecordStatus.OK
            ):
                return record.aupr
        return None

    def summary(self) -> RunSummary:
        summary = RunSummary(
            experiment=self.config.experiment,
            config_hash=self.config.config_hash(),
            seeds=list(self.config.seeds),
            output_dir=str(self.out_dir),
            records=self.records,
            checks=self.suite.results(),
            tables=self.tables,
            notices=self.notices,
            metadata=self.metadata,
        )
        reports.write_summary(summary, self.out_dir)
        return summary


def _start(config: ExperimentConfig, out: Optional[Union[str, Path]]) -> _Run:
    out_dir = reports.resolve_output_dir(config, out)
    reports.write_config(config, out_dir)
    logger.info(
        "Starting experiment",
        extra={
            "experiment": config.experiment.value,
            "seeds": config.seeds,
            "output_dir": str(out_dir),
        },
    )
    return _Run(config=config, out_dir=out_dir)


def _population(config: ExperimentConfig, seed: int) -> Population:
    pc = config.population
    pop = generate_population(
        pc.gaussian.model_copy(update={"seed": seed}), pc.n_total, pc.prevalence
    )
    pop = partition_known(pop, pc.known_fraction, seed)
    logger.info(
        "Population ready",
        extra={"seed": seed, "n_known": pop.n_known, "q_pool": pop.q_pool},
    )
    return pop


def _forest_params(config: ExperimentConfig, seed: int) -> ForestParams:
    tree_seed = int(derive_rng(seed, "forest", config.forest.seed).integers(0, 2**63))
    return config.forest.model_copy(update={"seed": tree_seed})


def _fit(
    config: ExperimentConfig, pop: Population, source: LabelSource, seed: int
) -> Tuple[LabeledSet, ForestModel]:
    train_set = build_training_set(
        pop, config.split.train_size, config.split.pos_neg_ratio, source, seed
    )
    return train_set, train(train_set, _forest_params(config, seed))


def _test_set(
    config: ExperimentConfig,
    pop: Population,
    p_tilde: float,
    source: LabelSource,
    seed: int,
    train_set: LabeledSet,
) -> TestSet:
    # every mixing fraction of a (seed, label source) shares one nested stream
    size = config.split.test_size
    return build_test_set(pop, size, p_tilde, source, seed, train_set.ids, NESTED_TEST_STREAM)


def _score(model: ForestModel, test: TestSet) -> ScoredTestSet:
    return ScoredTestSet(
        ids=test.ids,
        scores=predict_scores(model, test.features),
        observed=test.observed,
        true=test.true,
    )


def _evaluate(
    run: _Run,
    pop: Population,
    model: ForestModel,
    train_set: LabeledSet,
    source: LabelSource,
    p_tilde: float,
    seed: int,
    case: str,
    setting: Optional[str] = None,
) -> Tuple[ScoredTestSet, PRCurve]:
    """Score one test set, write its curve and append an ok record."""
    setting = setting or setting_label(p_tilde)
    test = _test_set(run.config, pop, p_tilde, source, seed, train_set)
    scored = _score(model, test)
    curve = pr_curve(scored.scores, scored.observed)
    _record_curve(run, scored, curve, pop, setting, seed, case, p_tilde)
    return scored, curve


def _record_curve(
    run: _Run,
    scored: ScoredTestSet,
    curve: PRCurve,
    pop: Population,
    setting: str,
    seed: int,
    case: str,
    p_tilde: float,
    delta_p: Optional[float] = None,
) -> None:
    path = reports.write_curve(curve, run.out_dir / "curves" / f"{case}_p{setting}_seed{seed}.csv")
    alpha_pos, alpha_neg = class_accuracies(scored)
    run.records.append(
        RunRecord(
            setting=setting,
            seed=seed,
            case=case,
            p_tilde=p_tilde,
            p_tilde_realized=scored.p_tilde,
            q_pool=pop.q_pool,
            delta_p=delta_p,
            aupr=curve.aupr,
            alpha_pos=alpha_pos,
            alpha_neg=alpha_neg,
            curve_path=run.relative(path),
        )
    )
    logger.info(
        "Evaluated test set",
        extra={"setting": setting, "seed": seed, "case": case, "aupr": curve.aupr},
    )


def _sweep(run: _Run, pop: Population, source: LabelSource, seed: int, case: str) -> None:
    train_set, model = _fit(run.config, pop, source, seed)
    for p_tilde in run.config.split.p_tildes:
        try:
            _evaluate(run, pop, model, train_set, source, p_tilde, seed, case)
        except SkewBenchError as e:
            run.fail(setting_label(p_tilde), seed, case, e, p_tilde=p_tilde)


def _check_increasing(run: _Run, case: str) -> None:
    p_tildes = sorted(run.config.split.p_tildes)
    if len(p_tildes) < 2:
        return
    name = f"{case}_aupr_increases_with_mixing"
    run.suite.declare(name, "AUPR strictly increases with the test-set mixing fraction")
    for seed in run.config.seeds:
        values = [run.aupr(setting_label(p), seed, case) for p in p_tildes]
        run.suite.record(name, None not in values and strictly_increasing(values))


def _per_seed(run: _Run, body: Callable[[int], None]) -> None:
    for seed in run.config.seeds:
        try:
            body(seed)
        except SkewBenchError as e:
            run.fail("*", seed, "*", e)


@log_timing()
def run_skew_sweep(config: ExperimentConfig, out: Optional[Union[str, Path]] = None) -> RunSummary:
    """Ideal labels: one forest per seed, one PR curve per mixing fraction."""
    run = _start(config, out)

    def body(seed: int) -> None:
        _sweep(run, _population(config, seed), LabelSource.IDEAL_A, seed, "ideal")

    _per_seed(run, body)
    _check_increasing(run, "ideal")
    return run.summary()


@log_timing()
def run_partial_label_sweep(
    config: ExperimentConfig, out: Optional[Union[str, Path]] = None
) -> RunSummary:
    """The same sweep with labels from the known set, next to its ideal counterpart."""
    run = _start(config, out)

    def body(seed: int) -> None:
        pop = _population(config, seed)
        _sweep(run, pop, LabelSource.REAL_B, seed, "real")
        _sweep(run, pop, LabelSource.IDEAL_A, seed, "ideal")

    _per_seed(run, body)
    _check_increasing(run, "real")
    for p_tilde in config.split.p_tildes:
        setting = setting_label(p_tilde)
        name = f"real_at_most_ideal@{setting}"
        run.suite.declare(name, "AUPR with known-set labels does not exceed the ideal AUPR")
        for seed in config.seeds:
            real, ideal = run.aupr(setting, seed, "real"), run.aupr(setting, seed, "ideal")
            run.suite.record(name, real is not None and ideal is not None and real <= ideal)
    return run.summary()


def _pivot(run: _Run, cases: Dict[str, str], name: str) -> None:
    """Table with one row per (seed, case) and one AUPR column per setting."""
    settings_ = [setting_label(p) for p in run.config.split.p_tildes]
    rows = []
    for seed in run.config.seeds:
        for case, label in cases.items():
            row: Dict[str, object] = {"seed": seed, "case": label}
            for setting in settings_:
                row[setting] = run.aupr(setting, seed, case)
            rows.append(row)
    path = reports.write_table(rows, run.out_dir / f"{name}.csv", ["seed", "case"] + settings_)
    run.add_table(name, path)


@log_timing()
def run_label_correction(
    config: ExperimentConfig, out: Optional[Union[str, Path]] = None
) -> RunSummary:
    """Re-score known-set test sets after restoring the hidden positives' labels."""
    run = _start(config, out)
    dominance = "corrected_precision_dominates"
    ordering = "corrected_aupr_at_least_observed"
    run.suite.require_all(dominance, "Corrected precision >= observed precision at every threshold")
    run.suite.declare(ordering, "Corrected AUPR >= observed AUPR")

    def body(seed: int) -> None:
        pop = _population(config, seed)
        real_train, real_model = _fit(config, pop, LabelSource.REAL_B, seed)
        ideal_train, ideal_model = _fit(config, pop, LabelSource.IDEAL_A, seed)
        for p_tilde in config.split.p_tildes:
            setting = setting_label(p_tilde)
            try:
                test = _test_set(config, pop, p_tilde, LabelSource.REAL_B, seed, real_train)
                scored = _score(real_model, test)
                observed, corrected = corrected_pr(scored.scores, scored.observed, scored.true)
                _record_curve(run, scored, observed, pop, setting, seed, "observed", p_tilde)
                relabeled = ScoredTestSet(
                    ids=scored.ids, scores=scored.scores, observed=scored.true, true=scored.true
                )
                _record_curve(run, relabeled, corrected, pop, setting, seed, "corrected", p_tilde)
                run.suite.record(dominance, threshold_dominance(observed, corrected))
                run.suite.record(ordering, corrected.aupr >= observed.aupr)
            except SkewBenchError as e:
                run.fail(setting, seed, "observed", e, p_tilde=p_tilde)
            try:
                _evaluate(
                    run, pop, ideal_model, ideal_train, LabelSource.IDEAL_A, p_tilde, seed, "ideal"
                )
            except SkewBenchError as e:
                run.fail(setting, seed, "ideal", e, p_tilde=p_tilde)

    _per_seed(run, body)
    _pivot(run, TABLE_ONE_ROWS, "aupr_table")
    return run.summary()


@log_timing()
def run_threeway(config: ExperimentConfig, out: Optional[Union[str, Path]] = None) -> RunSummary:
    """
    Real (known-set labels at p_tilde), proposed (known-set labels at
    p_tilde + delta_p) and ideal (true labels at p_tilde) for every setting.
    """
    run = _start(config, out)
    run.metadata["proposed_interpretation"] = PROPOSED_INTERPRETATION
    gap = "proposed_gap_at_most_real_gap"
    run.suite.declare(gap, "|ideal - proposed| <= |ideal - real|")

    def body(seed: int) -> None:
        pop = _population(config, seed)
        real_train, real_model = _fit(config, pop, LabelSource.REAL_B, seed)
        ideal_train, ideal_model = _fit(config, pop, LabelSource.IDEAL_A, seed)
        for p_tilde in config.split.p_tildes:
            setting = setting_label(p_tilde)
            cases = (
                ("real", real_model, real_train, LabelSource.REAL_B),
                ("ideal", ideal_model, ideal_train, LabelSource.IDEAL_A),
            )
            for case, model, train_set, source in cases:
                try:
                    _evaluate(run, pop, model, train_set, source, p_tilde, seed, case)
                except SkewBenchError as e:
                    run.fail(setting, seed, case, e, p_tilde=p_tilde)
            _proposed(run, pop, real_model, real_train, p_tilde, seed)

    _per_seed(run, body)

    for p_tilde in config.split.p_tildes:
        setting = setting_label(p_tilde)
        name = f"real_proposed_ideal_ordering@{setting}"
        run.suite.declare(name, "AUPR(real) <= AUPR(proposed) <= AUPR(ideal)")
        for seed in config.seeds:
            values = [run.aupr(setting, seed, case) for case in ("real", "proposed", "ideal")]
            if None in values:
                run.suite.record(name, False)
                continue
            real, proposed, ideal = values
            run.suite.record(name, non_decreasing(values))
            run.suite.record(gap, abs(ideal - proposed) <= abs(ideal - real))

    _pivot(run, {"real": "real", "proposed": "proposed", "ideal": "ideal"}, "aupr_table")
    return run.summary()


def _proposed(
    run: _Run,
    pop: Population,
    model: ForestModel,
    train_set: LabeledSet,
    p_tilde: float,
    seed: int,
) -> None:
    setting = setting_label(p_tilde)
    try:
        delta = delta_p_simplified(p_tilde, pop.q_pool)
    except DomainError as e:
        run.fail(setting, seed, "proposed", e, p_tilde=p_tilde)
        return
    mixed = p_tilde + delta
    if not 0 < mixed < 1:
        logger.warning(
            "Skipping proposed setting",
            extra={"setting": setting, "seed": seed, "p_tilde": mixed},
        )
        run.records.append(
            RunRecord(
                setting=setting,
                seed=seed,
                case="proposed",
                p_tilde=mixed,
                delta_p=delta,
                q_pool=pop.q_pool,
                status=RecordStatus.SKIPPED,
                message=f"proposed mixing {mixed} outside (0, 1)",
            )
        )
        return
    logger.info("Applying delta_p", extra={"setting": setting, "seed": seed, "delta_p": delta})
    try:
        test = _test_set(run.config, pop, mixed, LabelSource.REAL_B, seed, train_set)
        scored = _score(model, test)
        curve = pr_curve(scored.scores, scored.observed)
        _record_curve(run, scored, curve, pop, setting, seed, "proposed", mixed, delta)
    except SkewBenchError as e:
        run.fail(setting, seed, "proposed", e, p_tilde=mixed, delta_p=delta)


@log_timing()
def run_alpha_sweep(config: ExperimentConfig, out: Optional[Union[str, Path]] = None) -> RunSummary:
    """Closed-form mixing offset across classifier accuracies, one table per prevalence."""
    run = _start(config, out)
    ac = config.alpha_sweep
    variances: Dict[str, float] = {}
    for p in ac.p_values:
        label = f"{p:.6g}"
        q = ac.q_ratio * p
        sweep = alpha_sensitivity_sweep(p, q, ac.alpha_grid, with_numeric=ac.with_numeric)
        rows = [
            {
                "alpha": row.alpha,
                "delta_p": row.delta_p,
                "valid": int(row.valid),
                "delta_p_numeric": row.delta_p_numeric,
                "objective_value": row.objective_value,
            }
            for row in sweep.rows
        ]
        path = reports.write_table(rows, run.out_dir / f"alpha_sweep_p{label}.csv")
        run.add_table(f"alpha_sweep_p{label}", path)
        variances[label] = sweep.abs_delta_variance

        name = f"abs_delta_variance_bounded@{label}"
        run.suite.require_all(name, f"variance of |delta_p| <= {ac.variance_bound:g}")
        run.suite.record(name, sweep.abs_delta_variance <= ac.variance_bound)

        if ac.with_numeric:
            matches = f"numeric_matches_closed_form@{label}"
            run.suite.require_all(matches, "|numeric delta_p| equals |closed-form delta_p|")
            converged = f"numeric_objective_converged@{label}"
            run.suite.require_all(converged, "numeric objective <= 1e-18")
            for row in sweep.rows:
                if not row.valid or row.delta_p_numeric is None:
                    continue
                run.suite.record(
                    matches,
                    relative_match(
                        abs(row.delta_p_numeric), abs(row.delta_p), ac.relative_tolerance
                    ),
                )
                run.suite.record(converged, row.objective_value <= 1e-18)

        logger.info(
            "Alpha sweep finished",
            extra={"p": p, "q": q, "abs_delta_variance": sweep.abs_delta_variance},
        )
    run.metadata["abs_delta_variance"] = variances
    return run.summary()


def _anchor_candidates(
    known: PairList, scored_pairs: List[Tuple[str, float]], threshold: int
) -> Dict[str, Dict[str, float]]:
    degree = known.degree()
    anchors = sorted((p for p, d in degree.items() if d > threshold), key=lambda p: (-degree[p], p))
    candidates: Dict[str, Dict[str, float]] = {anchor: {} for anchor in anchors}
    for identifier, score in scored_pairs:
        parts = identifier.split(PAIR_SEPARATOR)
        if len(parts) != 2:
            raise DomainError(f"score id {identifier!r} is not a pair id")
        a, b = parts
        if a in candidates:
            candidates[a][b] = score
        if b in candidates:
            candidates[b][a] = score
    return candidates


def hub_file_name(rank: int, anchor: str) -> str:
    """Per-anchor report name; the rank keeps anchors that sanitize alike apart."""
    safe = re.sub(r"[^A-Za-z0-9._-]", "_", anchor)
    return f"hub_{rank:03d}_{safe}.csv"


def _hub_reports(
    run: _Run, known: PairList, scored_pairs: List[Tuple[str, float]], seed: int, prefix: str
) -> None:
    hub = run.config.hub
    candidates = _anchor_candidates(known, scored_pairs, hub.hub_threshold)
    if not candidates:
        notice = f"no protein has more than {hub.hub_threshold} known partners"
        logger.warning("Empty hub report", extra={"seed": seed, "hub_threshold": hub.hub_threshold})
        run.notices.append(notice if not prefix else f"{prefix}: {notice}")
        return

    report_list: List[RankedReport] = []
    for rank, (anchor, scores) in enumerate(candidates.items(), start=1):
        report = ranked_report(
            anchor, scores, known.partners(anchor), hub.k_max, hub.target_precision
        )
        report_list.append(report)
        path = run.out_dir / prefix / hub_file_name(rank, anchor)
        reports.write_ranked_report(report, path)
        run.records.append(
            RunRecord(
                setting=anchor,
                seed=seed,
                case="hub",
                curve_path=run.relative(path),
                message=f"precision@1={report.precision_at_k.get(1)}",
            )
        )

    pooled = pooled_threshold(report_list, hub.target_precision)
    matrix = reports.write_hub_matrix(report_list, pooled, hub.k_max, run.out_dir / prefix / "hub_matrix.csv")
    at_k = reports.write_precision_at_k(report_list, run.out_dir / prefix / "hub_precision_at_k.csv")
    run.add_table(f"{prefix}/hub_matrix".lstrip("/"), matrix)
    run.add_table(f"{prefix}/hub_precision_at_k".lstrip("/"), at_k)
    run.metadata.setdefault("pooled_threshold", {})[prefix or "input"] = pooled
    logger.info(
        "Hub reports written",
        extra={"seed": seed, "anchors": len(report_list), "pooled_threshold": pooled},
    )


@log_timing()
def run_hub_report(config: ExperimentConfig, out: Optional[Union[str, Path]] = None) -> RunSummary:
    """
    Ranked candidate lists for well-annotated hub proteins.

    With a pair list and score file in the config they are used as given;
    otherwise a synthetic interactome is generated per seed and scored by a
    forest trained on its known pairs.
    """
    run = _start(config, out)
    hub = config.hub

    if hub.pair_list is not None and hub.scores is not None:
        known = ingest_pair_list(hub.pair_list, has_header=hub.has_header)
        _hub_reports(run, known, load_scores(hub.scores), config.seeds[0], "")
        return run.summary()

    sc = hub.synthetic

    def body(seed: int) -> None:
        true, known = synthesize_interactome(
            sc.n_proteins,
            sc.n_hubs,
            sc.hub_degree,
            sc.background_degree,
            sc.hub_known_fraction,
            sc.known_fraction,
            seed,
        )
        pop, pair_ids = pair_population(
            sorted(true.proteins), true, known, sc.gaussian.model_copy(update={"seed": seed})
        )
        train_set = build_training_set(
            pop, sc.train_size, config.split.pos_neg_ratio, LabelSource.REAL_B, seed
        )
        model = train(train_set, _forest_params(config, seed))
        scores = predict_scores(model, pop.features)
        _hub_reports(run, known, list(zip(pair_ids, scores.tolist())), seed, f"seed{seed}")

    _per_seed(run, body)
    return run.summary()


@log_timing()
def run_bias_tables(config: ExperimentConfig, out: Optional[Union[str, Path]] = None) -> RunSummary:
    """Closed-form precision grid plus a simulated label-flipping classifier per seed."""
    run = _start(config, out)
    bc = config.bias_tables
    dominance = "contaminated_exceeds_uniform"
    run.suite.require_all(dominance, "Contaminated precision exceeds uniform precision when q > 0")

    closed_rows = []
    for alpha in bc.alphas:
        exact = exact_precision(alpha, bc.p).value
        for p_tilde in bc.p_tildes:
            uniform = expected_precision_uniform(alpha, p_tilde).value
            two_class = expected_precision_two_class(alpha, alpha, p_tilde).value
            ratio = overestimation_ratio(alpha, p_tilde, bc.p)
            for q in bc.qs:
                try:
                    contaminated: Optional[float] = expected_precision_contaminated(
                        alpha, p_tilde, q
                    ).value
                except DomainError:
                    contaminated = None
                if q > 0 and contaminated is not None:
                    run.suite.record(dominance, contaminated > uniform)
                closed_rows.append(
                    {
                        "alpha": alpha,
                        "p_tilde": p_tilde,
                        "q": q,
                        "uniform": uniform,
                        "two_class": two_class,
                        "contaminated": contaminated,
                        "exact": exact,
                        "overestimation_ratio": ratio,
                    }
                )
    path = reports.write_table(closed_rows, run.out_dir / "closed_forms.csv")
    run.add_table("closed_forms", path)

    tracking = "channel_matches_two_class"
    run.suite.require_all(tracking, "Simulated precision within 3 standard errors of the closed form")
    channel_rows = []
    for seed in config.seeds:
        for alpha in bc.alphas:
            for p_tilde in bc.p_tildes:
                for q in bc.qs:
                    try:
                        scored = simulate_channel(alpha, alpha, p_tilde, q, bc.channel_size, seed)
                        comparison = empirical_vs_expected(scored)
                    except SkewBenchError as e:
                        run.fail(f"{alpha:g}/{p_tilde:g}/{q:g}", seed, "channel", e)
                        continue
                    if q == 0:
                        run.suite.record(tracking, comparison.measured_within())
                    channel_rows.append(
                        {
                            "seed": seed,
                            "alpha": alpha,
                            "p_tilde": p_tilde,
                            "q": q,
                            "alpha_pos": comparison.alpha_pos,
                            "alpha_neg": comparison.alpha_neg,
                            "predicted_positive": comparison.n_predicted_positive,
                            "measured": comparison.measured_precision,
                            "corrected": comparison.corrected_precision,
                            "expected_two_class": comparison.expected_two_class,
                            "expected_contaminated": comparison.expected_contaminated,
                            "standard_error": comparison.standard_error,
                            "corrected_standard_error": comparison.corrected_standard_error,
                            "corrected_tracks_contaminated": int(comparison.corrected_within()),
                        }
                    )
    path = reports.write_table(channel_rows, run.out_dir / "channel.csv")
    run.add_table("channel", path)
    return run.summary()


RUNNERS: Dict[ExperimentName, Callable[..., RunSummary]] = {
    ExperimentName.SKEW_SWEEP: run_skew_sweep,
    ExperimentName.PARTIAL_LABEL_SWEEP: run_partial_label_sweep,
    ExperimentName.LABEL_CORRECTION: run_label_correction,
    ExperimentName.THREEWAY: run_threeway,
    ExperimentName.ALPHA_SWEEP: run_alpha_sweep,
    ExperimentName.HUB_REPORT: run_hub_report,
    ExperimentName.BIAS_TABLES: run_bias_tables,
}


def run_experiment(config: ExperimentConfig, out: Optional[Union[str, Path]] = None) -> RunSummary:
    with run_context(experiment=config.experiment.value, config_hash=config.config_hash()[:12]):
        return RUNNERS[config.experiment](config, out)
