from fastapi import APIRouter, HTTPException

from ...core.errors import QConvError
from ...schemas.sparse import ReshapeOut, ReshapeRequest
from ...services import runs

router = APIRouter(prefix="/reshape", tags=["reshape"])


@router.post("", response_model=ReshapeOut)
def reshape_kernel(payload: ReshapeRequest):
    x = payload.input.to_array() if payload.input is not None else None
    try:
        return runs.run_reshape(
            payload.kernel.to_array(),
            payload.height,
            payload.width,
            stride=payload.stride,
            pad=payload.pad,
            baseline=payload.baseline,
            x=x,
            image=payload.image,
        )
    except QConvError as e:
        raise HTTPException(e.http_status, str(e))
