import asyncio
import inspect

from ..subscriptions import EventSubscription


def _notify(subscription, *args):
    # a subscription is a queue-like object, a coroutine function or a plain callback
    if callable(getattr(subscription, "put_nowait", None)):
        subscription.put_nowait(args[0] if args else None)
    elif inspect.iscoroutinefunction(subscription):
        asyncio.ensure_future(subscription(*args))
    else:
        subscription(*args)


class _Event:
    __slots__ = ("flag", "subscribers")

    def __init__(self):
        self.flag = asyncio.Event()
        self.subscribers = set()

    def fire(self, *args):
        self.flag.set()
        for subscription in list(self.subscribers):
            _notify(subscription, *args)


class EventHandler:
    """
    The lifecycle shared by job producers and result consumers. An object becomes *ready* once its
    workers run and it accepts data, may hit an *error* that stops it as a whole, and is eventually
    *closed*. Each event can be awaited, or given a subscription: a queue-like object, a callback or
    a coroutine function.
    """

    def __init__(self, logger):
        self.__events = {"ready": _Event(), "error": _Event(), "close": _Event()}
        self.__error = None
        self.__evlog = logger

    @property
    def ready(self):
        return self.__events["ready"].flag.is_set()

    @property
    def error(self):
        """
        The first :class:`Exception` that stopped the object, or ``None``::

            if producer.error is not None:
                print("Sweep stopped:", producer.error)

        A job that fails does not set this: its exception travels inside its
        :class:`~arcwave.base.JobResult`.
        """
        return self.__error

    @property
    def closed(self):
        return self.__events["close"].flag.is_set()

    def _setReady(self, value=True):
        """
        Warning:
            Only call this if you are subclassing :class:`EventHandler`.
        """
        if self.__evlog is not None:
            self.__evlog.debug("Ready: %s", value)
        if value:
            self.__events["ready"].fire()
        else:
            self.__events["ready"].flag.clear()

    def _setError(self, value):
        """
        Records an error that stopped the object and notifies the :func:`onError` subscriptions.
        Only the first error is kept.

        Warning:
            Only call this if you are subclassing :class:`EventHandler`.
        """
        if value is None:
            return
        if self.__evlog is not None:
            self.__evlog.debug("Error: %s", value)
        if self.__error is None:
            self.__error = value
        self.__events["error"].fire(value)

    def __subscribe(self, name, subscription):
        if self.__evlog is not None:
            self.__evlog.debug("Adding %s subscription", name)
        self.__events[name].subscribers.add(subscription)
        return subscription

    def onReady(self, subscription=None):
        """
        Subscribes to the ready event. Without an argument returns an awaitable::

            await producer.onReady()
        """
        if subscription is None:
            return self.__events["ready"].flag.wait()
        return self.__subscribe("ready", subscription)

    def onError(self, subscription=None):
        """
        Subscribes to the error event, which carries the :class:`Exception`::

            @producer.onError
            def failed(err):
                print("Worker pool crashed:", err)

            err = await producer.onError()
        """
        return self.__subscribe("error", EventSubscription() if subscription is None else subscription)

    def onClose(self, subscription=None):
        """
        Subscribes to the close event. A job producer closes itself once every job has reported,
        so awaiting the producer waits for the whole batch::

            await producer
        """
        if subscription is None:
            return self.__events["close"].flag.wait()
        return self.__subscribe("close", subscription)

    def __await__(self):
        return self.onClose().__await__()

    def close(self):
        if self.closed:
            return
        self._setReady(False)
        if self.__evlog is not None:
            self.__evlog.debug("Closed")
        self.__events["close"].fire()


class ThreadedEventHandler(EventHandler):
    """
    An :class:`EventHandler` whose ready and error events may be raised from worker threads; they
    are handed to the event loop.
    """

    def __init__(self, logger, loop=None):
        # the cooperative __init__ chain may reach here twice; keep the first loop
        self._loop = loop or getattr(self, "_loop", None) or asyncio.get_running_loop()
        super().__init__(logger)

    def _setError(self, err):
        self._loop.call_soon_threadsafe(super()._setError, err)

    def _setReady(self, value=True):
        self._loop.call_soon_threadsafe(super()._setReady, value)
