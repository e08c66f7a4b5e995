import asyncio


class EventSubscription:
    """
    Holds the first value put in it; later puts are ignored. Used for one-shot events such as
    the error of a producer.
    """

    def __init__(self):
        self._fired = asyncio.Event()
        self._value = None

    def put_nowait(self, value):
        if not self._fired.is_set():
            self._value = value
            self._fired.set()

    async def get(self):
        await self._fired.wait()
        return self._value

    def __await__(self):
        return self.get().__await__()


class OrderedSubscription:
    """
    Results of a job batch arrive in completion order; the OrderedSubscription hands them out in
    index order, waiting for the next index when it has not arrived yet::

        s = producer.subscribe(OrderedSubscription(len(jobs)))
        for _ in range(len(jobs)):
            result = await s.get()  # result.index == 0, 1, 2, ...

    Anything with an ``index`` attribute can be put in it. It is not threadsafe.

    Args:
        expected (int, optional): number of results in the batch; :func:`get` past it raises
            :class:`IndexError`.
    """

    def __init__(self, expected=None):
        self._expected = expected
        self._pending = {}
        self._next = 0
        self._putEvent = asyncio.Event()

    def put_nowait(self, result):
        if result.index < self._next or result.index in self._pending:
            raise ValueError("Duplicate result for index %d" % result.index)
        self._pending[result.index] = result
        self._putEvent.set()

    async def get(self):
        if self._expected is not None and self._next >= self._expected:
            raise IndexError("All %d results were already returned" % self._expected)
        while self._next not in self._pending:
            self._putEvent.clear()
            await self._putEvent.wait()
        result = self._pending.pop(self._next)
        self._next += 1
        return result

    def drain(self):
        """
        Returns the results that are ready in order, without waiting, stopping at the first gap.
        """
        out = []
        while self._next in self._pending:
            out.append(self._pending.pop(self._next))
            self._next += 1
        return out

    @property
    def complete(self):
        return self._expected is not None and self._next + len(self._pending) >= self._expected

    def __len__(self):
        return len(self._pending)
