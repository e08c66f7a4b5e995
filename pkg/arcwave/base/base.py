import asyncio
import logging

from .events import EventHandler, _notify


class ConsumerClosed(Exception):
    """
    Raised by :func:`ResultConsumer._get` once the consumer was closed, or by a source that closed
    while being read.
    """

    pass


class ResultProducer(EventHandler):
    """
    Fans results out to any number of subscribers: the worker pool running the nodes of a sweep is
    one. Subscriptions are objects with ``put_nowait`` (queues,
    :class:`~arcwave.subscriptions.OrderedSubscription`, a :class:`~arcwave.io.CSVWriter`),
    callbacks, or coroutine functions::

        producer = ThreadedJobProducer(jobs, threads=4)
        results = producer.subscribe()
        first = await results.get()

    Subclasses call :func:`_put_nowait` for each result.

    Args:
        subscriptionClass (optional): what :func:`subscribe` creates when called without
            arguments. Defaults to :class:`asyncio.Queue`.
        replay (bool, optional): also hand results emitted before a subscription was made to it,
            so that a late subscriber sees the whole batch.
        logger (optional): parent logger.
    """

    def __init__(self, subscriptionClass=asyncio.Queue, replay=False, logger=None):
        self.__subscribers = set()
        self.__subscriptionClass = subscriptionClass
        self.__default = None
        self.__history = [] if replay else None
        self.__emitted = 0

        #: Whether :func:`close` was called. Should only be accessed from a subclass.
        self._shouldClose = False

        self.__log = (logger or logging.getLogger(self.__class__.__name__)).getChild("ResultProducer")
        super().__init__(self.__log)

    @property
    def emitted(self):
        """
        Number of results handed out so far.
        """
        return self.__emitted

    def subscribe(self, subscription=None):
        """
        Adds a subscriber and returns it; without an argument a new ``subscriptionClass`` is made::

            @producer.subscribe
            def progress(result):
                print("node", result.index, "done")
        """
        if subscription is None:
            subscription = self.__subscriptionClass()
        self.__log.debug("Subscribing %s", subscription)
        self.__subscribers.add(subscription)
        for element in self.__history or ():
            _notify(subscription, element)
        return subscription

    def _put_nowait(self, element):
        """
        Warning:
            Only call this if you are subclassing :class:`ResultProducer`.
        """
        self.__emitted += 1
        if self.__history is not None:
            self.__history.append(element)
        for subscription in list(self.__subscribers):
            _notify(subscription, element)

    def unsubscribe(self, subscription=None):
        """
        Removes a subscriber, or the default subscription used by :func:`get` when called without
        arguments. Unknown subscribers are ignored.
        """
        if subscription is None:
            subscription, self.__default = self.__default, None
            if subscription is None:
                return
        self.__log.debug("Unsubscribing %s", subscription)
        self.__subscribers.discard(subscription)

    def unsubscribeAll(self):
        self.__subscribers = set()
        self.__default = None

    async def get(self):
        """
        The next result from a default subscription, created on first call.
        """
        if self.__default is None:
            self.__default = self.subscribe()
        return await self.__default.get()

    def close(self):
        """
        Stops producing and drops every subscriber.
        """
        if self.closed:
            return
        self._shouldClose = True
        self.unsubscribeAll()
        super().close()


class ResultConsumer(EventHandler):
    """
    Reads results either from its own inbox, filled through :func:`put_nowait`, or from a source
    set with :func:`putSubscription` (anything with an awaitable ``get``). The source can be
    swapped while a read is waiting.
    """

    def __init__(self, inboxClass=asyncio.Queue, logger=None):
        self.__inbox = inboxClass()
        self._source = self.__inbox
        self._shouldClose = False

        # the pending read, cancelled when the source changes or the consumer closes
        self._pending = None

        self.__log = (logger or logging.getLogger(self.__class__.__name__)).getChild("ResultConsumer")
        super().__init__(self.__log)

    async def _get(self):
        """
        The next element of the current source, following source swaps.

        Warning:
            Only call this if you are subclassing :class:`ResultConsumer`.

        Raises:
            :class:`ConsumerClosed`: the consumer was closed.
        """
        while not self._shouldClose:
            source = self._source
            self._pending = asyncio.ensure_future(source.get())
            try:
                return await self._pending
            except asyncio.CancelledError:
                if self._source is source and not self._shouldClose:
                    # we were cancelled ourselves
                    raise
                self.__log.debug("Source changed to %s", self._source)
            except ConsumerClosed:
                self.__log.debug("Source %s closed, reading the inbox", source)
                if self._source is source:
                    self._source = self.__inbox
        raise ConsumerClosed("%s has been closed" % self.__class__.__name__)

    def put_nowait(self, data):
        """
        Puts data in the inbox, and switches back to reading it if another source was set.
        """
        self.stopSubscription()
        self.__inbox.put_nowait(data)

    def putSubscription(self, subscription):
        """
        Reads ``await subscription.get()`` from now on::

            writer.putSubscription(producer.subscribe(OrderedSubscription(len(jobs))))
        """
        if subscription is self._source:
            return
        self.__log.debug("Reading from %s", subscription)
        self._source = subscription
        if self._pending is not None and not self._pending.done():
            self._pending.cancel()

    def stopSubscription(self):
        self.putSubscription(self.__inbox)

    @property
    def subscription(self):
        """
        The source being read, or ``None`` when reading the inbox.
        """
        return None if self._source is self.__inbox else self._source

    def close(self):
        if not self.closed:
            self._shouldClose = True
            if self._pending is not None and not self._pending.done():
                self._pending.cancel()
        super().close()
