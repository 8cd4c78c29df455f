import pytest

from riskchoice.orders import enumerate_linear_orders, enumerate_weak_orders, ordered_bell


def test_two_items():
    assert sorted(enumerate_weak_orders(["a", "b"])) == [
        (("a",), ("b",)), (("a", "b"),), (("b",), ("a",)),
    ]


@pytest.mark.parametrize("n, count", [(1, 1), (2, 3), (3, 13), (4, 75), (5, 541), (6, 4683),
                                      (7, 47293)])
def test_weak_order_counts(n, count):
    orders = list(enumerate_weak_orders(n))
    assert len(orders) == count == ordered_bell(n)
    assert len(set(orders)) == count


def test_weak_orders_are_partitions():
    for wo in enumerate_weak_orders(4):
        flat = [x for cls in wo for x in cls]
        assert sorted(flat) == ["0", "1", "2", "3"] and all(cls for cls in wo)


def test_linear_orders():
    orders = list(enumerate_linear_orders(7))
    assert len(orders) == len(set(orders)) == 5040
    assert orders == sorted(orders)


@pytest.mark.parametrize("bad", [0, 10])
def test_guard(bad):
    with pytest.raises(ValueError):
        list(enumerate_weak_orders(bad))


def test_distinct_names_required():
    with pytest.raises(ValueError):
        list(enumerate_linear_orders(["a", "a"]))
