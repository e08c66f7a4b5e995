import asyncio
import concurrent.futures
import logging
import threading

from .base import ResultProducer
from .events import ThreadedEventHandler


class JobResult:
    """
    The outcome of one job: its position in the batch, and either its value or the exception it
    raised.
    """

    __slots__ = ("index", "value", "error")

    def __init__(self, index, value=None, error=None):
        self.index = index
        self.value = value
        self.error = error

    @property
    def ok(self):
        return self.error is None

    def __repr__(self):
        if self.ok:
            return "JobResult(%d, %r)" % (self.index, self.value)
        return "JobResult(%d, error=%r)" % (self.index, self.error)


class ThreadedJobProducer(ResultProducer, ThreadedEventHandler):
    """
    Runs a batch of zero-argument callables on a thread pool and emits a :class:`JobResult` for each
    one as it finishes, in completion order. Once every job has reported, the producer closes
    itself, so it can be awaited::

        producer = ThreadedJobProducer(sweep_jobs(...), threads=4)
        results = producer.subscribe(OrderedSubscription(len(jobs)))
        await producer
        values = [r.value for r in results.drain()]

    A failing job does not stop the batch. Must be created inside a running event loop.

    Args:
        jobs: the callables.
        threads (int, optional): pool size.
    """

    def __init__(self, jobs, threads=1, subscriptionClass=asyncio.Queue, logger=None, loop=None):
        self._loop = loop or asyncio.get_running_loop()
        ResultProducer.__init__(self, subscriptionClass, logger=logger)
        self.__log = (logger or logging.getLogger(self.__class__.__name__)).getChild("ThreadedJobProducer")

        self._jobs = list(jobs)
        self._remaining = len(self._jobs)
        self._lock = threading.Lock()
        self._executor = concurrent.futures.ThreadPoolExecutor(max_workers=max(1, int(threads)))

        # let subscribers attach before anything can finish
        self._loop.call_soon(self._start)

    def __len__(self):
        return len(self._jobs)

    def _start(self):
        if self._shouldClose:
            return
        self.__log.debug("Starting %d jobs", len(self._jobs))
        if not self._jobs:
            self._setReady(True)
            self._loop.call_soon_threadsafe(self.close)
            return
        for k, job in enumerate(self._jobs):
            self._executor.submit(self._run, k, job)
        self._setReady(True)

    def _run(self, index, job):
        # runs in a worker thread
        try:
            result = JobResult(index, value=job())
        except Exception as e:
            self.__log.debug("Job %d failed: %s", index, e)
            result = JobResult(index, error=e)
        if self._shouldClose:
            return
        self._loop.call_soon_threadsafe(self._put_nowait, result)
        with self._lock:
            self._remaining -= 1
            done = self._remaining == 0
        if done:
            self._loop.call_soon_threadsafe(self.close)

    def close(self):
        """
        Stops the batch: jobs that have not started are cancelled, and results of running ones are
        dropped. Does not wait for running jobs.
        """
        super().close()
        self._executor.shutdown(wait=False, cancel_futures=True)
