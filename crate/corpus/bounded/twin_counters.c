int main() {
    unsigned int i = 0;
    unsigned int j = 0;
    while (i < 200) {
        i++;
        j++;
    }
    assert(j == 200);
}
