import aiounittest
import asyncio
from arcwave.base import JobResult
from arcwave.subscriptions import EventSubscription, OrderedSubscription


class TestSubscriptions(aiounittest.AsyncTestCase):
    async def test_Ordered(self):
        """
        Tests OrderedSubscription
        """
        s = OrderedSubscription(expected=4)
        s.put_nowait(JobResult(2, "c"))
        s.put_nowait(JobResult(0, "a"))

        self.assertEqual((await s.get()).value, "a")

        # 1 has not arrived yet, so get waits for it
        getTask = asyncio.ensure_future(s.get())
        await asyncio.sleep(0.01)
        self.assertFalse(getTask.done())

        s.put_nowait(JobResult(1, "b"))
        await getTask
        self.assertEqual(getTask.result().value, "b")
        self.assertEqual(len(s), 1)
        self.assertFalse(s.complete)

        s.put_nowait(JobResult(3, "d"))
        self.assertTrue(s.complete)
        self.assertEqual([r.value for r in s.drain()], ["c", "d"])

        with self.assertRaises(IndexError):
            await s.get()

    async def test_OrderedDuplicates(self):
        s = OrderedSubscription()
        s.put_nowait(JobResult(0, 1))
        with self.assertRaises(ValueError):
            s.put_nowait(JobResult(0, 2))
        await s.get()
        # already handed out
        with self.assertRaises(ValueError):
            s.put_nowait(JobResult(0, 3))

    async def test_OrderedDrainStopsAtGap(self):
        s = OrderedSubscription()
        s.put_nowait(JobResult(0, "a"))
        s.put_nowait(JobResult(2, "c"))
        self.assertEqual([r.index for r in s.drain()], [0])
        self.assertEqual(s.drain(), [])
        self.assertFalse(s.complete)

    async def test_Event(self):
        s = EventSubscription()
        getTask = asyncio.ensure_future(s.get())
        await asyncio.sleep(0.01)
        self.assertFalse(getTask.done())

        s.put_nowait("fired")
        self.assertEqual(await getTask, "fired")

        # only the first value counts
        s.put_nowait("again")
        self.assertEqual(await s, "fired")
