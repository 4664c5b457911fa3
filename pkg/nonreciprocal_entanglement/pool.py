from concurrent.futures import ProcessPoolExecutor


def pool_map(fn, tasks, jobs=1):
    """Map fn over tasks, in task order, on up to `jobs` worker processes.

    fn and every task must be picklable; results come back in input order
    whatever the completion order was.
    """
    tasks = list(tasks)
    if not jobs or jobs <= 1 or len(tasks) < 2:
        return [fn(task) for task in tasks]
    chunksize = max(1, len(tasks) // (jobs * 8))
    with ProcessPoolExecutor(max_workers=jobs) as executor:
        return list(executor.map(fn, tasks, chunksize=chunksize))
