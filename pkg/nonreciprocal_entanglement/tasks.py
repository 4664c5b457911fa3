import logging
import os

from nonreciprocal_entanglement.model.sweep.sweep import emit, presets, run_sweep

logger = logging.getLogger(__name__)


def run_preset(parts, out_dir, format="csv", jobs=1, branch=None):
    """Run every part of one preset, one output file per part. Returns (paths, failed rows)."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    failed = 0
    for spec in parts:
        logger.info("verarbeite %s", spec.name)
        table = run_sweep(spec, jobs=jobs, branch=branch)
        failed += table.failed()
        path = os.path.join(out_dir, spec.name.replace("/", "_") + "." + format)
        emit(table, path, format)
        paths.append(path)
    return paths, failed


def run_all_presets(out_dir, format="csv", jobs=1, branch=None, base=None, overrides=None):
    logger.info("starte alle Presets")
    all_presets = presets(base, overrides)
    if not all_presets:
        logger.warning("keine Presets gefunden")
        return [], 0
    paths = []
    failed = 0
    for parts in all_presets.values():
        written, not_ok = run_preset(parts, out_dir, format, jobs, branch)
        paths += written
        failed += not_ok
    return paths, failed
