from .optim import Adam, OptimState, adam_step, clip_grad_norm
from .trainer import (
    TrainConfig, ReciprocalPair, train_step, train_epoch, pretrain,
    reciprocal_train, HISTORY_FIELDS)
from .checkpoint import save_checkpoint, load_checkpoint
