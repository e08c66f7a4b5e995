import asyncio
import aiounittest
import threading
import time
from arcwave.base import (
    ResultConsumer,
    ResultProducer,
    JobResult,
    ConsumerClosed,
    ThreadedJobProducer,
)
from arcwave.subscriptions import OrderedSubscription


class TestBaseClasses(aiounittest.AsyncTestCase):
    async def test_ResultConsumer(self):
        c = ResultConsumer(asyncio.Queue)

        c.put_nowait("test")

        self.assertEqual(await c._get(), "test")
        self.assertEqual(c.subscription, None)

        q = asyncio.Queue()
        q.put_nowait("yay")
        c.putSubscription(q)

        self.assertEqual(c.subscription, q)
        self.assertEqual(await c._get(), "yay")

        # The current source is q, put_nowait switches back to the inbox
        getTask = asyncio.ensure_future(c._get())

        # Give time for the task to start
        await asyncio.sleep(0.01)

        c.put_nowait("Hi!")

        await getTask

        self.assertEqual(getTask.result(), "Hi!")
        self.assertEqual(c.subscription, None)

        c.close()
        await c
        with self.assertRaises(ConsumerClosed):
            await c._get()

    async def test_ResultProducer(self):
        p = ResultProducer(asyncio.Queue)

        q1 = p.subscribe()
        q2 = p.subscribe()

        p._put_nowait("1")

        self.assertEqual(await q1.get(), "1")
        self.assertEqual(await q2.get(), "1")

        # Unsubscribe should stop it receiving updates
        p.unsubscribe(q2)

        p._put_nowait("2")

        q2.put_nowait(12)

        self.assertEqual(await q1.get(), "2")
        self.assertEqual(await q2.get(), 12)

        # get creates the default subscription on first call
        getTask = asyncio.ensure_future(p.get())
        await asyncio.sleep(0.01)
        p._put_nowait("3")

        await getTask
        self.assertEqual(getTask.result(), "3")
        self.assertEqual(await q1.get(), "3")

        received = []
        p.subscribe(received.append)

        async def collect(x):
            received.append(x + "!")

        p.subscribe(collect)
        p._put_nowait("4")
        await asyncio.sleep(0.01)
        self.assertEqual(sorted(received), ["4", "4!"])

        p.unsubscribeAll()
        p._put_nowait("5")
        q1.put_nowait(8)

        self.assertEqual(await q1.get(), 8)

        p.unsubscribe()
        p.unsubscribe()

        p.close()

        await p
        self.assertTrue(p.closed)

    async def test_replay(self):
        p = ResultProducer(replay=True)
        p._put_nowait("a")
        p._put_nowait("b")

        # a late subscriber still sees the earlier results
        late = p.subscribe()
        p._put_nowait("c")
        self.assertEqual([late.get_nowait() for _ in range(3)], ["a", "b", "c"])
        self.assertEqual(p.emitted, 3)
        p.close()

    async def test_events(self):
        p = ResultProducer()
        errors = []
        p.onError(errors.append)
        closed = []
        p.onClose(lambda: closed.append(True))

        p._setReady(True)
        await p.onReady()
        self.assertTrue(p.ready)

        p._setError(RuntimeError("broken"))
        self.assertEqual(str(p.error), "broken")
        self.assertEqual(len(errors), 1)

        p.close()
        self.assertFalse(p.ready)
        self.assertEqual(closed, [True])


class TestThreadedJobProducer(aiounittest.AsyncTestCase):
    async def test_results(self):
        jobs = [(lambda k=k: k * k) for k in range(8)]
        p = ThreadedJobProducer(jobs, threads=3)
        q = p.subscribe()
        self.assertEqual(len(p), 8)

        await p

        results = sorted((q.get_nowait() for _ in range(q.qsize())), key=lambda r: r.index)
        self.assertEqual([r.index for r in results], list(range(8)))
        self.assertEqual([r.value for r in results], [k * k for k in range(8)])
        self.assertTrue(all(r.ok for r in results))
        self.assertEqual(p.error, None)

    async def test_failing_job(self):
        def fail():
            raise ValueError("node diverged")

        p = ThreadedJobProducer([lambda: 1, fail, lambda: 3], threads=2)
        s = p.subscribe(OrderedSubscription(3))

        results = [await s.get() for _ in range(3)]
        await p

        self.assertEqual(results[0].value, 1)
        self.assertFalse(results[1].ok)
        self.assertIsInstance(results[1].error, ValueError)
        self.assertEqual(results[2].value, 3)
        # a failing job does not stop the batch
        self.assertEqual(p.error, None)

    async def test_completion_order(self):
        # the first job finishes last; the ordered subscription still starts with it
        def slow():
            time.sleep(0.2)
            return "slow"

        p = ThreadedJobProducer([slow, lambda: "fast"], threads=2)
        arrival = p.subscribe()
        ordered = p.subscribe(OrderedSubscription(2))

        first = await arrival.get()
        self.assertEqual(first.index, 1)

        self.assertEqual((await ordered.get()).value, "slow")
        self.assertEqual((await ordered.get()).value, "fast")
        await p

    async def test_empty(self):
        p = ThreadedJobProducer([])
        await p
        self.assertTrue(p.closed)

    async def test_close(self):
        gate = threading.Event()
        p = ThreadedJobProducer([gate.wait, gate.wait], threads=1)
        q = p.subscribe()
        await p.onReady()
        await asyncio.sleep(0.01)

        p.close()
        gate.set()
        await asyncio.sleep(0.1)

        self.assertTrue(p.closed)
        # results of a closed batch are dropped
        self.assertEqual(q.qsize(), 0)

    async def test_job_result(self):
        self.assertTrue(JobResult(0, 5).ok)
        self.assertEqual(repr(JobResult(2, 5)), "JobResult(2, 5)")
        self.assertFalse(JobResult(1, error=KeyError("x")).ok)
