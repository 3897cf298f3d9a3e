from .tensor import Tensor, tensor, param, concat, tile_leading, mse, l1
from .layers import Dense, LSTM, MLP, RecurrentRegressor, lstm_seq, xavier_uniform, orthogonal
from .optim import Adam, clip_grad_norm
from .checkpoint import save_checkpoint, load_checkpoint, restore_params
