unsigned int dec(unsigned int v) {
    return v - 1;
}

int main() {
    unsigned int x = *;
    while (x > 0)
        x = dec(x);
    assert(x == 0);
}
