from .base import ConsumerClosed, ResultConsumer, ResultProducer
from .thread import JobResult, ThreadedJobProducer
